#include "nodallab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>

#include "nodallab/error.hpp"

namespace nodallab::svg {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

using Key = std::pair<double, double>;
Key key(Vec2 p) { return {p.x, p.y}; }

}  // namespace

std::vector<std::vector<Vec2>> polylines(const NodalSet& nodal) {
  const auto& segs = nodal.segments;
  std::multimap<Key, std::size_t> at;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    at.emplace(key(segs[i].a), i);
    at.emplace(key(segs[i].b), i);
  }
  std::vector<char> used(segs.size(), 0);
  auto next_from = [&](Vec2 p) -> std::ptrdiff_t {
    auto [lo, hi] = at.equal_range(key(p));
    for (auto it = lo; it != hi; ++it) {
      if (!used[it->second]) return static_cast<std::ptrdiff_t>(it->second);
    }
    return -1;
  };
  std::vector<std::vector<Vec2>> chains;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (used[s]) continue;
    used[s] = 1;
    std::vector<Vec2> fwd{segs[s].a, segs[s].b};
    for (std::ptrdiff_t j; (j = next_from(fwd.back())) >= 0;) {
      used[static_cast<std::size_t>(j)] = 1;
      const auto& g = segs[static_cast<std::size_t>(j)];
      fwd.push_back(key(g.a) == key(fwd.back()) ? g.b : g.a);
    }
    std::vector<Vec2> back;
    for (std::ptrdiff_t j; (j = next_from(back.empty() ? fwd.front() : back.back())) >= 0;) {
      used[static_cast<std::size_t>(j)] = 1;
      const Vec2 tail = back.empty() ? fwd.front() : back.back();
      const auto& g = segs[static_cast<std::size_t>(j)];
      back.push_back(key(g.a) == key(tail) ? g.b : g.a);
    }
    std::reverse(back.begin(), back.end());
    back.insert(back.end(), fwd.begin(), fwd.end());
    chains.push_back(std::move(back));
  }

  // Near a singular point the lattice cannot resolve thin wedges, so rays
  // may join a few cells out. Vertices inside the cluster's reach are
  // dropped and each remaining piece is led into the point itself.
  const double h = nodal.spacing();
  for (const auto& sp : nodal.singular_points) {
    const double reach = h * (3.0 + std::sqrt(static_cast<double>(sp.cluster_size) / std::numbers::pi));
    std::vector<std::vector<Vec2>> split;
    for (auto& c : chains) {
      bool touches = false;
      for (const auto& v : c) touches = touches || norm(v - sp.position) < reach;
      if (!touches) {
        split.push_back(std::move(c));
        continue;
      }
      std::vector<Vec2> run;
      bool after_inside = false;
      for (const auto& v : c) {
        if (norm(v - sp.position) < reach) {
          if (!run.empty()) {
            run.push_back(sp.position);
            split.push_back(std::move(run));
            run.clear();
          }
          after_inside = true;
          continue;
        }
        if (run.empty() && after_inside) run.push_back(sp.position);
        run.push_back(v);
      }
      if (run.size() > 1) split.push_back(std::move(run));
    }
    chains = std::move(split);
  }
  return chains;
}

std::string nodal_svg(const NodalSet& nodal, int size_px) {
  const double margin = 10.0, half = 0.5 * size_px - margin;
  const double scale = half / nodal.radius, c = 0.5 * size_px;
  auto X = [&](double x) { return fmt(c + scale * x); };
  auto Y = [&](double y) { return fmt(c - scale * y); };
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size_px << "\" height=\"" << size_px
      << "\" viewBox=\"0 0 " << size_px << ' ' << size_px << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<circle cx=\"" << fmt(c) << "\" cy=\"" << fmt(c) << "\" r=\"" << fmt(half)
      << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  for (const auto& chain : polylines(nodal)) {
    out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < chain.size(); ++i) out << (i ? " " : "") << X(chain[i].x) << ',' << Y(chain[i].y);
    out << "\"/>\n";
  }
  for (const auto& sp : nodal.singular_points) {
    out << "<circle class=\"singular\" cx=\"" << X(sp.position.x) << "\" cy=\"" << Y(sp.position.y)
        << "\" r=\"4\" fill=\"red\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string trace_svg(const FunctionalTrace& trace, int width_px, int height_px) {
  if (trace.radii.size() != trace.values.size()) throw Error(ErrorKind::Data, "trace has mismatched columns");
  const double left = 70, right = 20, top = 30, bottom = 50;
  const double w = width_px - left - right, h = height_px - top - bottom;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_px << "\" height=\"" << height_px
      << "\" viewBox=\"0 0 " << width_px << ' ' << height_px << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  std::vector<double> xs, ys;
  bool log_y = !trace.values.empty();
  for (double v : trace.values) log_y = log_y && v > 0.0;
  for (std::size_t i = 0; i < trace.radii.size(); ++i) {
    if (!(trace.radii[i] > 0.0) || !std::isfinite(trace.values[i])) continue;
    xs.push_back(std::log10(trace.radii[i]));
    ys.push_back(log_y ? std::log10(trace.values[i]) : trace.values[i]);
  }
  const std::string ylabel = (log_y ? "log10 " : "") + trace.label;
  if (!xs.empty()) {
    auto [xlo, xhi] = std::minmax_element(xs.begin(), xs.end());
    auto [ylo, yhi] = std::minmax_element(ys.begin(), ys.end());
    double x0 = *xlo, x1 = *xhi, y0 = *ylo, y1 = *yhi;
    if (x1 == x0) x1 = x0 + 1.0;
    // Flat traces get a symmetric band so the line sits mid-chart.
    const double pad = (y1 - y0) > 1e-12 * std::max(1.0, std::abs(y0)) ? 0.05 * (y1 - y0)
                                                                      : 0.5 * std::max(1e-12, std::abs(y0));
    y0 -= pad;
    y1 += pad;
    auto PX = [&](double x) { return left + w * (x - x0) / (x1 - x0); };
    auto PY = [&](double y) { return top + h * (1.0 - (y - y0) / (y1 - y0)); };
    out << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? " " : "") << fmt(PX(xs[i])) << ',' << fmt(PY(ys[i]));
    out << "\"/>\n";
    char buf[64];
    for (auto [val, px] : {std::pair{x0, left}, std::pair{x1, left + w}}) {
      std::snprintf(buf, sizeof buf, "%.3g", val);
      out << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(top + h + 16) << "\" font-size=\"11\" text-anchor=\"middle\">"
          << buf << "</text>\n";
    }
    for (auto [val, py] : {std::pair{y0, top + h}, std::pair{y1, top}}) {
      std::snprintf(buf, sizeof buf, "%.4g", val);
      out << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(py + 4) << "\" font-size=\"11\" text-anchor=\"end\">"
          << buf << "</text>\n";
    }
  }
  out << "<text x=\"" << fmt(left + 0.5 * w) << "\" y=\"" << fmt(height_px - 12.0)
      << "\" font-size=\"13\" text-anchor=\"middle\">log10 r</text>\n";
  out << "<text x=\"16\" y=\"" << fmt(top + 0.5 * h) << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << fmt(top + 0.5 * h) << ")\">" << escape(ylabel) << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace nodallab::svg
