#include "nodallab/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <tuple>

#include "nodallab/error.hpp"
#include "parallel.hpp"

namespace nodallab {

namespace {

// Globally defined formulas can be sampled just outside the unit disk, which
// keeps the boundary cells of a full-disk extraction.
bool globally_defined(const PlanarField& field) {
  return field.kind() == PlanarField::Kind::Homogeneous || field.kind() == PlanarField::Kind::ClosedForm;
}

std::optional<double> sample(const PlanarField& field, Vec2 x) {
  if (field.contains(x) || globally_defined(field)) return field.eval_unchecked(x);
  return std::nullopt;
}

std::optional<Segment> clip_to_disk(Segment s, double radius) {
  const Vec2 d = s.b - s.a;
  const double A = dot(d, d), B = 2.0 * dot(s.a, d), C = dot(s.a, s.a) - radius * radius;
  if (A == 0.0) return C <= 0.0 ? std::optional<Segment>(s) : std::nullopt;
  const double disc = B * B - 4.0 * A * C;
  if (disc <= 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  const double t0 = std::max(0.0, (-B - sq) / (2.0 * A));
  const double t1 = std::min(1.0, (-B + sq) / (2.0 * A));
  if (!(t1 > t0)) return std::nullopt;
  return Segment{s.a + t0 * d, s.a + t1 * d};
}

Vec2 node_position(const NodalSet& nodal, std::size_t ix, std::size_t iy) {
  const double h = nodal.spacing();
  return {-nodal.radius + h * static_cast<double>(ix), -nodal.radius + h * static_cast<double>(iy)};
}

bool in_disk(const NodalSet& nodal, Vec2 x) { return dot(x, x) <= nodal.radius * nodal.radius * (1.0 + 1e-12); }

}  // namespace

NodalSet extract_nodal_set(const PlanarField& field, std::size_t cells, double radius, unsigned jobs) {
  if (cells < 64) throw Error(ErrorKind::Argument, "extract_nodal_set: need at least 64 cells per side");
  if (!(radius > 0.0)) throw Error(ErrorKind::Argument, "extract_nodal_set: radius must be > 0");
  NodalSet nodal;
  nodal.grid_cells = cells;
  nodal.radius = radius;
  const std::size_t m = cells + 1;
  const double h = nodal.spacing();

  std::vector<double> v(m * m, std::numeric_limits<double>::quiet_NaN());
  std::vector<char> valid(m * m, 0);
  detail::parallel_for(m, jobs, [&](std::size_t iy) {
    for (std::size_t ix = 0; ix < m; ++ix) {
      const auto s = sample(field, node_position(nodal, ix, iy));
      if (!s) continue;
      if (!std::isfinite(*s)) {
        std::ostringstream msg;
        msg << "non-finite field value at lattice node (" << ix << ", " << iy << ")";
        throw Error(ErrorKind::Data, msg.str());
      }
      v[iy * m + ix] = *s;
      valid[iy * m + ix] = 1;
    }
  });

  std::vector<std::vector<Segment>> rows(cells);
  detail::parallel_for(cells, jobs, [&](std::size_t iy) {
    auto& out = rows[iy];
    for (std::size_t ix = 0; ix < cells; ++ix) {
      const std::size_t id[4] = {iy * m + ix, iy * m + ix + 1, (iy + 1) * m + ix + 1, (iy + 1) * m + ix};
      if (!(valid[id[0]] && valid[id[1]] && valid[id[2]] && valid[id[3]])) continue;
      const Vec2 c0 = node_position(nodal, ix, iy);
      // Skip cells entirely outside the disk.
      const Vec2 centre = c0 + Vec2{0.5 * h, 0.5 * h};
      if (norm(centre) > radius + h) continue;
      const Vec2 corner[4] = {c0, node_position(nodal, ix + 1, iy), node_position(nodal, ix + 1, iy + 1),
                              node_position(nodal, ix, iy + 1)};
      double val[4];
      bool pos[4];
      for (int k = 0; k < 4; ++k) {
        val[k] = v[id[k]];
        pos[k] = val[k] >= 0.0;
      }
      // Edge e joins corners e and e+1; interpolate left-to-right or
      // bottom-to-top so neighbouring cells produce bit-identical points.
      auto crossing = [&](int e) {
        static constexpr int from[4] = {0, 1, 3, 0}, to[4] = {1, 2, 2, 3};
        const int a = from[e], b = to[e];
        const double t = val[a] / (val[a] - val[b]);
        return corner[a] + t * (corner[b] - corner[a]);
      };
      std::vector<int> edges;
      for (int e = 0; e < 4; ++e) {
        if (pos[e] != pos[(e + 1) % 4]) edges.push_back(e);
      }
      // A zero corner next to a negative one yields a crossing on the corner
      // itself; the degenerate segments this produces are dropped.
      auto emit = [&](int e0, int e1) {
        const Vec2 a = crossing(e0), b = crossing(e1);
        if (a == b) return;
        if (auto s = clip_to_disk({a, b}, radius)) out.push_back(*s);
      };
      if (edges.size() == 2) {
        emit(edges[0], edges[1]);
      } else if (edges.size() == 4) {
        const double mid = field.eval_unchecked(centre);
        if ((mid >= 0.0) == pos[0]) {
          // Corners 0 and 2 connect through the centre; cut off 1 and 3.
          emit(0, 1);
          emit(2, 3);
        } else {
          emit(3, 0);
          emit(1, 2);
        }
      }
    }
  });
  for (auto& row : rows) nodal.segments.insert(nodal.segments.end(), row.begin(), row.end());
  return nodal;
}

double nodal_length(const NodalSet& nodal, double radius) {
  double total = 0.0;
  for (const auto& s : nodal.segments) {
    if (auto c = clip_to_disk(s, radius)) total += c->length();
  }
  return total;
}

SingularThresholds default_thresholds(const PlanarField& field, const NodalSet& nodal) {
  const std::size_t m = nodal.grid_cells + 1;
  double umax = 0.0, gmax = 0.0;
  for (std::size_t iy = 0; iy < m; ++iy) {
    for (std::size_t ix = 0; ix < m; ++ix) {
      const Vec2 x = node_position(nodal, ix, iy);
      if (!in_disk(nodal, x) || !field.contains(x)) continue;
      const auto vg = field.eval_with_grad_unchecked(x);
      umax = std::max(umax, std::abs(vg.value));
      gmax = std::max(gmax, norm(vg.grad));
    }
  }
  const double h = nodal.spacing();
  const double expo = std::min(gamma_q(field.params()), 2.0);
  return {10.0 * std::pow(h, expo) * umax, 10.0 * h * gmax};
}

std::vector<SingularPoint> detect_singular(const PlanarField& field, NodalSet& nodal, double eps_u, double eps_g) {
  if (!(eps_u > 0.0) || !(eps_g > 0.0)) throw Error(ErrorKind::Argument, "detect_singular: thresholds must be > 0");
  const std::size_t m = nodal.grid_cells + 1;
  std::vector<char> inside(m * m, 0), hit(m * m, 0);
  std::vector<ValueGrad> vg(m * m);
  std::vector<double> g(m * m, std::numeric_limits<double>::infinity());
  for (std::size_t iy = 0; iy < m; ++iy) {
    for (std::size_t ix = 0; ix < m; ++ix) {
      const std::size_t id = iy * m + ix;
      const Vec2 x = node_position(nodal, ix, iy);
      if (!in_disk(nodal, x) || !field.contains(x)) continue;
      inside[id] = 1;
      vg[id] = field.eval_with_grad_unchecked(x);
      g[id] = norm(vg[id].grad);
      hit[id] = std::abs(vg[id].value) < eps_u && g[id] < eps_g;
    }
  }
  auto neighbours = [&](std::size_t id, auto&& visit) {
    const auto ix = static_cast<std::ptrdiff_t>(id % m), iy = static_cast<std::ptrdiff_t>(id / m);
    for (std::ptrdiff_t dy = -1; dy <= 1; ++dy) {
      for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
        const auto jx = ix + dx, jy = iy + dy;
        if ((dx == 0 && dy == 0) || jx < 0 || jy < 0 || jx >= static_cast<std::ptrdiff_t>(m) ||
            jy >= static_cast<std::ptrdiff_t>(m)) {
          continue;
        }
        const auto j = static_cast<std::size_t>(jy) * m + static_cast<std::size_t>(jx);
        if (inside[j]) visit(j);
      }
    }
  };

  std::vector<std::size_t> parent(m * m);
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };

  for (std::size_t id = 0; id < m * m; ++id) {
    if (!hit[id]) continue;
    neighbours(id, [&](std::size_t j) {
      if (hit[j]) unite(id, j);
    });
  }

  auto representatives = [&] {
    std::vector<std::size_t> best(m * m, m * m), size(m * m, 0), roots;
    for (std::size_t id = 0; id < m * m; ++id) {
      if (!hit[id]) continue;
      const std::size_t r = find(id);
      if (best[r] == m * m) roots.push_back(r);
      if (best[r] == m * m || g[id] < g[best[r]]) best[r] = id;
      ++size[r];
    }
    return std::tuple{roots, best, size};
  };

  // Near a singular point the flagged set thins into tendrils along the
  // nodal lines, which the lattice samples only sporadically. Two clusters
  // are one if the straight path between their representatives stays below
  // both thresholds.
  const double h = nodal.spacing();
  auto flagged_path = [&](Vec2 a, Vec2 b) {
    const auto steps = static_cast<std::size_t>(std::ceil(2.0 * norm(b - a) / h));
    for (std::size_t s = 1; s < steps; ++s) {
      const Vec2 x = a + (static_cast<double>(s) / static_cast<double>(steps)) * (b - a);
      if (!field.contains(x)) return false;
      const auto v = field.eval_with_grad_unchecked(x);
      if (!(std::abs(v.value) < eps_u && norm(v.grad) < eps_g)) return false;
    }
    return true;
  };
  {
    const auto [roots, best, size] = representatives();
    for (std::size_t i = 0; i < roots.size(); ++i) {
      for (std::size_t j = i + 1; j < roots.size(); ++j) {
        if (find(roots[i]) == find(roots[j])) continue;
        const std::size_t bi = best[roots[i]], bj = best[roots[j]];
        if (flagged_path(node_position(nodal, bi % m, bi / m), node_position(nodal, bj % m, bj / m))) {
          unite(roots[i], roots[j]);
        }
      }
    }
  }

  const auto [roots, best, size] = representatives();
  std::vector<SingularPoint> points;
  for (std::size_t r : roots) {
    const std::size_t b = best[r];
    points.push_back({node_position(nodal, b % m, b / m), std::abs(vg[b].value), g[b], size[r]});
  }
  nodal.singular_points = points;
  return points;
}

std::vector<SingularPoint> detect_singular(const PlanarField& field, NodalSet& nodal) {
  const auto t = default_thresholds(field, nodal);
  if (!(t.eps_u > 0.0)) {
    throw Error(ErrorKind::ZeroField, "detect_singular: field vanishes on the extraction lattice");
  }
  if (!(t.eps_g > 0.0)) {
    // constant and nonzero: no zeros at all
    nodal.singular_points.clear();
    return {};
  }
  return detect_singular(field, nodal, t.eps_u, t.eps_g);
}

ProfileZeros profile_zero_structure(const AngularProfile& profile, double antipodal_tolerance) {
  ProfileZeros out;
  const std::size_t n = profile.size();
  const auto& v = profile.values();
  if (profile.scale() == 0.0) {
    out.degenerate = true;
    return out;
  }
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = (j + 1) % n;
    const bool pa = v[j] >= 0.0, pb = v[k] >= 0.0;
    if (pa == pb) continue;
    double a = profile.node(j), b = a + profile.spacing();
    if (v[k] == 0.0) {
      a = b;  // exact zero on the node
    } else {
      for (int it = 0; it < 100 && b - a > 1e-15; ++it) {
        const double mid = 0.5 * (a + b);
        ((profile.value_at(mid) >= 0.0) == pa ? a : b) = mid;
      }
    }
    const double z = std::fmod(0.5 * (a + b), two_pi);
    out.zeros.push_back(z);
  }
  std::sort(out.zeros.begin(), out.zeros.end());
  out.min_abs_slope = out.zeros.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (double z : out.zeros) {
    out.slopes.push_back(profile.derivative_at(z));
    out.min_abs_slope = std::min(out.min_abs_slope, std::abs(out.slopes.back()));
  }
  out.antipodal = !out.zeros.empty();
  for (double z : out.zeros) {
    const double target = z + std::numbers::pi;
    bool found = false;
    for (double w : out.zeros) {
      double d = std::fmod(std::abs(w - target), two_pi);
      d = std::min(d, two_pi - d);
      if (d <= antipodal_tolerance) {
        found = true;
        break;
      }
    }
    if (!found) {
      out.antipodal = false;
      break;
    }
  }
  return out;
}

}  // namespace nodallab
