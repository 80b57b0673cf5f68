#include "nodallab/order.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nodallab/error.hpp"

namespace nodallab {

namespace {

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

void check_ladder(const PlanarField& field, Vec2 x0, const std::vector<double>& radii) {
  if (radii.size() < 2 || !is_valid_ladder(radii, std::numeric_limits<double>::infinity())) {
    throw Error(ErrorKind::Argument, "ladder must hold at least two strictly increasing positive radii");
  }
  if (!field.contains_ball(x0, radii.back())) {
    throw Error(ErrorKind::Domain, "the largest ladder ball leaves the field domain");
  }
}

OrderEstimate estimate_once(const PlanarField& field, Vec2 x0, const std::vector<double>& radii,
                            const OrderOptions& opts) {
  check_ladder(field, x0, radii);
  const auto moments = compute_moments(field, x0, radii, opts.quadrature);
  const double scale = moments.back().sphere_max_u;
  const double u0 = std::abs(field.eval(x0));
  if (u0 > opts.eps_u * scale || (scale == 0.0 && u0 > 0.0)) {
    std::ostringstream msg;
    msg << "x0 is not a zero of the field: |u(x0)| = " << u0 << " against sphere scale " << scale;
    throw Error(ErrorKind::Precondition, msg.str());
  }

  std::vector<double> lr, lh, l1;
  OrderEstimate est;
  for (const auto& m : moments) {
    const double h = H_of(m);
    if (!(h > m.eps_h(opts.quadrature.eps_h_factor)) || !(h > 0.0)) continue;
    lr.push_back(std::log(m.r));
    lh.push_back(0.5 * std::log(h / std::pow(m.r, kDimension - 1)));
    l1.push_back(std::log(h1_norm_of(m)));
    est.radii.push_back(m.r);
  }
  if (lr.size() < 2) {
    throw Error(ErrorKind::ZeroField, "H vanishes on the whole ladder; the field is zero near x0");
  }
  est.raw_slope = ls_slope(lr, lh);
  est.h1_slope = ls_slope(lr, l1);
  est.orders_agree = std::abs(est.raw_slope - est.h1_slope) <= opts.agreement_tolerance;
  est.r_window = {est.radii.front(), est.radii.back()};

  const auto admissible = admissible_orders(field.params());
  double best = admissible.front();
  for (double a : admissible) {
    if (std::abs(a - est.raw_slope) < std::abs(best - est.raw_slope)) best = a;
  }
  if (std::abs(best - est.raw_slope) <= opts.snap_tolerance) {
    est.snapped = best;
    est.snapped_to_gamma_q = best == admissible.back();
  }

  const double order = est.snapped.value_or(est.raw_slope);
  est.nondegeneracy_ratio = std::numeric_limits<double>::infinity();
  for (const auto& m : moments) {
    const double n1 = h1_norm_of(m);
    const double ratio = n1 * n1 / std::pow(m.r, 2.0 * order);
    est.nondegeneracy.push_back(ratio);
    est.nondegeneracy_ratio = std::min(est.nondegeneracy_ratio, ratio);
  }
  return est;
}

}  // namespace

std::vector<double> dyadic_ladder(double r_max, std::size_t count) {
  if (!(r_max > 0.0) || count == 0) throw Error(ErrorKind::Argument, "dyadic ladder: need r_max > 0 and count > 0");
  std::vector<double> radii(count);
  for (std::size_t j = 0; j < count; ++j) radii[count - 1 - j] = std::ldexp(r_max, -static_cast<int>(j));
  return radii;
}

std::vector<double> admissible_orders(const ProblemParams& params) {
  std::vector<double> out;
  for (int d = 1; d <= beta_q(params); ++d) out.push_back(d);
  out.push_back(gamma_q(params));
  return out;
}

OrderEstimate estimate_order(const PlanarField& field, Vec2 x0, const std::vector<double>& radii,
                             const OrderOptions& opts) {
  auto est = estimate_once(field, x0, radii, opts);
  if (!est.snapped && opts.widen) {
    // Clustered admissible orders: extend the ladder downward by as many
    // radii again, keeping its geometric ratio.
    const double ratio = radii[1] / radii[0];
    std::vector<double> wider;
    double r = radii.front();
    for (std::size_t j = 0; j < radii.size(); ++j) {
      r /= ratio;
      if (r < opts.min_radius || !(r > 0.0)) break;
      wider.push_back(r);
    }
    if (!wider.empty()) {
      std::reverse(wider.begin(), wider.end());
      wider.insert(wider.end(), radii.begin(), radii.end());
      OrderOptions once = opts;
      once.widen = false;
      est = estimate_once(field, x0, wider, once);
    }
  }
  if (opts.max_degree > 0) est.fourier = leading_harmonic(field, x0, radii, opts.max_degree, opts.quadrature);
  return est;
}

PlanarField blow_up(const PlanarField& field, Vec2 x0, double r, const QuadratureOptions& opts) {
  if (!(r > 0.0)) throw Error(ErrorKind::Argument, "blow_up: radius must be > 0");
  const double norm = h1_norm(field, x0, r, opts);
  if (!(norm > 0.0)) throw Error(ErrorKind::ZeroField, "blow_up: the field has zero norm on this ball");
  return PlanarField::rescaled(field, x0, r, norm);
}

HarmonicReport leading_harmonic(const PlanarField& field, Vec2 x0, const std::vector<double>& radii, int max_degree,
                                const QuadratureOptions& opts) {
  if (max_degree < 1) throw Error(ErrorKind::Argument, "leading_harmonic: max_degree must be >= 1");
  check_ladder(field, x0, radii);
  const std::size_t n = opts.theta_nodes;
  const auto nd = static_cast<std::size_t>(max_degree);
  // a[d][j], b[d][j]: Fourier coefficients of degree d + 1 on circle j.
  std::vector<std::vector<double>> a(nd, std::vector<double>(radii.size())), b = a;
  std::vector<double> rms(radii.size());
  for (std::size_t j = 0; j < radii.size(); ++j) {
    std::vector<double> u(n);
    double s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
      u[i] = field.eval_unchecked(x0 + radii[j] * Vec2{std::cos(th), std::sin(th)});
      s2 += u[i] * u[i];
    }
    rms[j] = std::sqrt(s2 / static_cast<double>(n));
    for (std::size_t d = 0; d < nd; ++d) {
      double ca = 0.0, cb = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        ca += u[i] * std::cos(static_cast<double>(d + 1) * th);
        cb += u[i] * std::sin(static_cast<double>(d + 1) * th);
      }
      a[d][j] = 2.0 * ca / static_cast<double>(n);
      b[d][j] = 2.0 * cb / static_cast<double>(n);
    }
  }

  HarmonicReport report;
  const double g = gamma_q(field.params());
  report.gamma_q_ambiguity = is_integer_value(g) && g <= max_degree;
  for (std::size_t d = 0; d < nd; ++d) {
    const double deg = static_cast<double>(d + 1);
    std::vector<double> c(radii.size());
    bool above_floor = true;
    double ca = 0.0, cb = 0.0;
    for (std::size_t j = 0; j < radii.size(); ++j) {
      const double mag = std::hypot(a[d][j], b[d][j]);
      if (!(mag > 1e-6 * rms[j])) above_floor = false;
      const double rd = std::pow(radii[j], deg);
      c[j] = mag / rd;
      ca += a[d][j] / rd;
      cb += b[d][j] / rd;
    }
    if (!above_floor) {
      report.fit_errors.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
    double mean = 0.0;
    for (double v : c) mean += v;
    mean /= static_cast<double>(c.size());
    const double fit = (*hi - *lo) / mean;
    report.fit_errors.push_back(fit);
    if (!report.leading && fit < 0.05) {
      report.leading = LeadingHarmonic{static_cast<int>(d + 1), ca / static_cast<double>(radii.size()),
                                       cb / static_cast<double>(radii.size()), fit};
    }
  }
  return report;
}

}  // namespace nodallab
