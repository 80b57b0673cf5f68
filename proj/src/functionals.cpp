#include "nodallab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nodallab/error.hpp"
#include "parallel.hpp"

namespace nodallab {

// --- traces and ladders -----------------------------------------------------

double FunctionalTrace::relative_spread() const noexcept {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (*hi - *lo == 0.0) return 0.0;
  return (*hi - *lo) / std::abs(mean);
}

bool is_valid_ladder(const std::vector<double>& radii, double limit) noexcept {
  if (radii.empty()) return false;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0 && radii[i] < limit)) return false;
    if (i > 0 && !(radii[i] > radii[i - 1])) return false;
  }
  return true;
}

std::vector<double> geometric_ladder(double r_min, double r_max, std::size_t n) {
  if (n < 2 || !(r_min > 0.0) || !(r_max > r_min)) throw Error(ErrorKind::Argument, "geometric_ladder: bad range");
  std::vector<double> out(n);
  const double ratio = std::log(r_max / r_min) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = r_min * std::exp(ratio * static_cast<double>(i));
  out.back() = r_max;
  return out;
}

std::vector<double> linear_ladder(double r_min, double r_max, std::size_t n) {
  if (n < 2 || !(r_min > 0.0) || !(r_max > r_min)) throw Error(ErrorKind::Argument, "linear_ladder: bad range");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = r_min + (r_max - r_min) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

std::vector<double> gamma_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw Error(ErrorKind::Argument, "gamma_grid: bad range");
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) out.push_back(lo + step * static_cast<double>(i));
  return out;
}

// --- quadrature -------------------------------------------------------------

double Moments::eps_h(double factor) const noexcept {
  // Relative to the largest sample on this circle: H is "zero" only when the
  // field vanishes on the sphere up to roundoff.
  return factor * sphere_max_u * sphere_max_u * std::pow(r, kDimension - 1);
}

double eval_F(const ProblemParams& params, double s) noexcept { return params.potential(s); }

namespace {

void require_ball(const PlanarField& field, Vec2 x0, double r) {
  if (!(r > 0.0)) throw Error(ErrorKind::Argument, "radius must be > 0");
  if (!field.contains_ball(x0, r)) {
    std::ostringstream msg;
    msg << "ball B_" << r << "(" << x0.x << ", " << x0.y << ") escapes the domain of " << field.describe();
    throw Error(ErrorKind::Domain, msg.str());
  }
}

struct CircleTable {
  std::vector<double> c, s;
  explicit CircleTable(std::size_t n) : c(n), s(n) {
    const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      c[j] = std::cos(h * static_cast<double>(j));
      s[j] = std::sin(h * static_cast<double>(j));
    }
  }
};

Moments moments_impl(const PlanarField& field, Vec2 x0, double r, const QuadratureOptions& opts, bool with_ball,
                     const CircleTable& table) {
  const auto& params = field.params();
  const std::size_t n = opts.theta_nodes;
  const double dtheta = 2.0 * std::numbers::pi / static_cast<double>(n);

  Moments m;
  m.center = x0;
  m.r = r;
  m.q = params.q();
  for (std::size_t j = 0; j < n; ++j) {
    const Vec2 nu{table.c[j], table.s[j]};
    const auto vg = field.eval_with_grad_unchecked(x0 + r * nu);
    const double un = dot(vg.grad, nu);
    m.sphere_u2 += vg.value * vg.value;
    m.sphere_u_un += vg.value * un;
    m.sphere_un2 += un * un;
    m.sphere_F += params.potential(vg.value);
    m.sphere_max_u = std::max(m.sphere_max_u, std::abs(vg.value));
  }
  const double arc = dtheta * r;
  m.sphere_u2 *= arc;
  m.sphere_u_un *= arc;
  m.sphere_un2 *= arc;
  m.sphere_F *= arc;

  if (with_ball) {
    const std::size_t panels = opts.radial_panels + (opts.radial_panels % 2);
    const double drho = r / static_cast<double>(panels);
    double grad2 = 0.0, pot = 0.0;
    // ρ = 0 contributes nothing (the area element carries a factor ρ).
    for (std::size_t i = 1; i <= panels; ++i) {
      const double rho = drho * static_cast<double>(i);
      const double w = (i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      double g = 0.0, f = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const auto vg = field.eval_with_grad_unchecked(x0 + rho * Vec2{table.c[j], table.s[j]});
        g += dot(vg.grad, vg.grad);
        f += params.potential(vg.value);
      }
      grad2 += w * rho * g;
      pot += w * rho * f;
    }
    const double scale = drho / 3.0 * dtheta;
    m.has_ball = true;
    m.ball_grad2 = grad2 * scale;
    m.ball_F = pot * scale;
  }
  return m;
}

void require_ball_moments(const Moments& m) {
  if (!m.has_ball) throw Error(ErrorKind::Argument, "moments were computed without the ball integrals");
}

}  // namespace

Moments compute_moments(const PlanarField& field, Vec2 x0, double r, const QuadratureOptions& opts, bool with_ball) {
  require_ball(field, x0, r);
  if (opts.theta_nodes < 8) throw Error(ErrorKind::Argument, "need at least 8 theta nodes");
  return moments_impl(field, x0, r, opts, with_ball, CircleTable(opts.theta_nodes));
}

std::vector<Moments> compute_moments(const PlanarField& field, Vec2 x0, const std::vector<double>& radii,
                                     const QuadratureOptions& opts, bool with_ball) {
  for (double r : radii) require_ball(field, x0, r);
  if (opts.theta_nodes < 8) throw Error(ErrorKind::Argument, "need at least 8 theta nodes");
  const CircleTable table(opts.theta_nodes);
  std::vector<Moments> out(radii.size());
  detail::parallel_for(radii.size(), opts.jobs,
                       [&](std::size_t i) { out[i] = moments_impl(field, x0, radii[i], opts, with_ball, table); });
  return out;
}

// --- functionals ------------------------------------------------------------

double H_of(const Moments& m) noexcept { return m.sphere_u2; }

double Dt_of(const Moments& m, double t) noexcept { return m.ball_grad2 - t / m.q * m.ball_F; }

double Nt_of(const Moments& m, double t, double eps_factor) {
  const double h = H_of(m);
  if (!(h > m.eps_h(eps_factor)) || !(h > std::numeric_limits<double>::min())) {
    std::ostringstream msg;
    msg << "H = " << h << " vanishes on the sphere of radius " << m.r << " (x0 is a high-order zero there)";
    throw Error(ErrorKind::DegenerateSphere, msg.str());
  }
  return m.r * Dt_of(m, t) / h;
}

double W_of(const Moments& m, double gamma, double t) noexcept {
  return std::pow(m.r, -(kDimension - 2 + 2 * gamma)) * Dt_of(m, t) -
         gamma * std::pow(m.r, -(kDimension - 1 + 2 * gamma)) * H_of(m);
}

double Phi_of(const Moments& m, double gamma) noexcept {
  const double n = kDimension;
  return (2 * n - (n - 2) * m.q) / (m.q * std::pow(m.r, n - 1 + 2 * gamma)) * m.ball_F;
}

double h1_norm_of(const Moments& m) noexcept {
  return std::sqrt(std::pow(m.r, -(kDimension - 2)) * m.ball_grad2 + std::pow(m.r, -(kDimension - 1)) * m.sphere_u2);
}

double W_derivative_rhs(const Moments& m, double gamma, double t) noexcept {
  const double n = kDimension, r = m.r, q = m.q;
  // ∫_S (u_ν - γ u / r)² expanded in the stored sphere moments.
  const double defect = m.sphere_un2 - 2.0 * gamma / r * m.sphere_u_un + gamma * gamma / (r * r) * m.sphere_u2;
  const double lead = 2.0 / std::pow(r, n - 2 + 2 * gamma) * defect;
  const double sphere_term = (2.0 - t) / (q * std::pow(r, n - 2 + 2 * gamma)) * m.sphere_F;
  const double ball_term =
      ((n - 2) * t - 2 * n + 2 * gamma * (t - q)) / (q * std::pow(r, n - 1 + 2 * gamma)) * m.ball_F;
  return lead + sphere_term + ball_term;
}

double H_derivative_rhs(const Moments& m) noexcept {
  return (kDimension - 1) / m.r * H_of(m) + 2.0 * Dt_of(m, m.q);
}

double eval_H(const PlanarField& field, Vec2 x0, double r, const QuadratureOptions& opts) {
  return H_of(compute_moments(field, x0, r, opts, false));
}

double eval_Dt(const PlanarField& field, Vec2 x0, double r, double t, const QuadratureOptions& opts) {
  return Dt_of(compute_moments(field, x0, r, opts), t);
}

double eval_Nt(const PlanarField& field, Vec2 x0, double r, double t, const QuadratureOptions& opts) {
  return Nt_of(compute_moments(field, x0, r, opts), t, opts.eps_h_factor);
}

double eval_W(const PlanarField& field, Vec2 x0, double r, double gamma, double t, const QuadratureOptions& opts) {
  return W_of(compute_moments(field, x0, r, opts), gamma, t);
}

double eval_Phi(const PlanarField& field, Vec2 x0, double r, double gamma, const QuadratureOptions& opts) {
  return Phi_of(compute_moments(field, x0, r, opts), gamma);
}

double h1_norm(const PlanarField& field, Vec2 x0, double r, const QuadratureOptions& opts) {
  return h1_norm_of(compute_moments(field, x0, r, opts));
}

std::string FunctionalSpec::label() const {
  std::ostringstream out;
  switch (kind) {
    case FunctionalKind::H: out << "H"; break;
    case FunctionalKind::Dt: out << "D_t(t=" << t << ")"; break;
    case FunctionalKind::Nt: out << "N_t(t=" << t << ")"; break;
    case FunctionalKind::W: out << "W(gamma=" << gamma << ",t=" << t << ")"; break;
    case FunctionalKind::Phi: out << "Phi(gamma=" << gamma << ")"; break;
    case FunctionalKind::H1: out << "h1_norm"; break;
  }
  return out.str();
}

FunctionalTrace sample_trace(const std::vector<Moments>& moments, const FunctionalSpec& spec) {
  FunctionalTrace trace;
  trace.label = spec.label();
  for (const auto& m : moments) {
    double v = 0.0;
    switch (spec.kind) {
      case FunctionalKind::H: v = H_of(m); break;
      case FunctionalKind::Dt: require_ball_moments(m); v = Dt_of(m, spec.t); break;
      case FunctionalKind::Nt: require_ball_moments(m); v = Nt_of(m, spec.t); break;
      case FunctionalKind::W: require_ball_moments(m); v = W_of(m, spec.gamma, spec.t); break;
      case FunctionalKind::Phi: require_ball_moments(m); v = Phi_of(m, spec.gamma); break;
      case FunctionalKind::H1: require_ball_moments(m); v = h1_norm_of(m); break;
    }
    trace.radii.push_back(m.r);
    trace.values.push_back(v);
  }
  return trace;
}

FunctionalTrace sample_trace(const PlanarField& field, Vec2 x0, const std::vector<double>& radii,
                             const FunctionalSpec& spec, const QuadratureOptions& opts) {
  if (!is_valid_ladder(radii, std::numeric_limits<double>::infinity())) {
    throw Error(ErrorKind::Argument, "radius ladder must be strictly increasing and positive");
  }
  return sample_trace(compute_moments(field, x0, radii, opts, spec.kind != FunctionalKind::H), spec);
}

// --- identity checks --------------------------------------------------------

IdentityReport check_derivative_identities(const PlanarField& field, Vec2 x0, const std::vector<double>& radii,
                                           double gamma, double t, const QuadratureOptions& opts,
                                           double relative_step) {
  if (!is_valid_ladder(radii, std::numeric_limits<double>::infinity())) {
    throw Error(ErrorKind::Argument, "derivative identities: ladder must be strictly increasing");
  }
  IdentityReport report;
  report.gamma = gamma;
  report.t = t;
  report.radii = radii;

  // Each ladder radius needs moments at r - δ, r, r + δ.
  std::vector<double> all;
  for (double r : radii) {
    const double d = relative_step * r;
    all.insert(all.end(), {r - d, r, r + d});
  }
  const auto m = compute_moments(field, x0, all, opts, true);

  for (std::size_t i = 0; i < radii.size(); ++i) {
    const auto& lo = m[3 * i];
    const auto& mid = m[3 * i + 1];
    const auto& hi = m[3 * i + 2];
    const double two_d = hi.r - lo.r;

    const double h_fd = (H_of(hi) - H_of(lo)) / two_d;
    const double h_rhs = H_derivative_rhs(mid);
    const double h_scale = std::max({std::abs(h_fd), std::abs(h_rhs), std::numeric_limits<double>::min()});
    report.h_residuals.push_back(std::abs(h_fd - h_rhs) / h_scale);

    const double w_fd = (W_of(hi, gamma, t) - W_of(lo, gamma, t)) / two_d;
    const double w_rhs = W_derivative_rhs(mid, gamma, t);
    // W and W' vanish identically for γ-homogeneous fields, so the residual
    // is measured against the size of the terms that cancel.
    const double w_scale = std::abs(w_fd) + std::abs(w_rhs) + std::abs(W_of(mid, gamma, t)) / mid.r +
                           gamma * H_of(mid) / std::pow(mid.r, kDimension + 2 * gamma) +
                           std::numeric_limits<double>::min();
    report.w_residuals.push_back(std::abs(w_fd - w_rhs) / w_scale);

    const double h = H_of(mid);
    if (h > mid.eps_h(opts.eps_h_factor)) {
      const double w = W_of(mid, gamma, t);
      const double via_n = h / std::pow(mid.r, kDimension - 1 + 2 * gamma) * (Nt_of(mid, t) - gamma);
      const double scale = std::abs(w) + h / std::pow(mid.r, kDimension - 1 + 2 * gamma) * (1.0 + gamma);
      report.wn_residuals.push_back(std::abs(w - via_n) / scale);
    } else {
      report.wn_residuals.push_back(0.0);
    }
  }
  auto max_of = [](const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); };
  report.max_h_residual = max_of(report.h_residuals);
  report.max_w_residual = max_of(report.w_residuals);
  report.max_wn_residual = max_of(report.wn_residuals);
  return report;
}

// --- monotonicity -----------------------------------------------------------

MonotonicityVerdict monotonicity_scan(const std::vector<Moments>& moments, const ProblemParams& params,
                                      double gamma) {
  if (gamma < gamma_q(params) * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "monotonicity of W_{gamma,2} needs gamma >= 2/(2-q) = " << gamma_q(params) << ", got " << gamma;
    throw Error(ErrorKind::Precondition, msg.str());
  }
  MonotonicityVerdict verdict;
  verdict.trace = sample_trace(moments, {FunctionalKind::W, gamma, 2.0});
  const auto& w = verdict.trace.values;
  for (std::size_t j = 0; j + 1 < w.size(); ++j) {
    const double tol = 1e-6 * (1.0 + std::abs(w[j]));
    const double drop = w[j] - w[j + 1];
    verdict.worst_drop = std::max(verdict.worst_drop, drop / tol);
    if (drop > tol && verdict.monotone) {
      verdict.monotone = false;
      verdict.violation_radius = verdict.trace.radii[j + 1];
    }
  }
  return verdict;
}

MonotonicityVerdict monotonicity_scan(const PlanarField& field, Vec2 x0, double gamma,
                                      const std::vector<double>& radii, const QuadratureOptions& opts) {
  if (gamma < gamma_q(field.params()) * (1.0 - 1e-12)) {
    return monotonicity_scan(std::vector<Moments>{}, field.params(), gamma);  // throws
  }
  if (!is_valid_ladder(radii, std::numeric_limits<double>::infinity())) {
    throw Error(ErrorKind::Argument, "monotonicity scan: ladder must be strictly increasing");
  }
  return monotonicity_scan(compute_moments(field, x0, radii, opts), field.params(), gamma);
}

// --- transition exponent ----------------------------------------------------

namespace {

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TransitionEstimate transition_exponent(const std::vector<Moments>& moments, const std::vector<double>& gammas,
                                       const TransitionOptions& topts) {
  if (moments.size() < 3) throw Error(ErrorKind::Argument, "transition exponent: need at least 3 radii");
  if (gammas.size() < 2) throw Error(ErrorKind::Argument, "transition exponent: need at least 2 gamma values");
  for (std::size_t i = 1; i < gammas.size(); ++i) {
    if (!(gammas[i] > gammas[i - 1])) throw Error(ErrorKind::Argument, "gamma grid must be increasing");
  }
  for (const auto& m : moments) require_ball_moments(m);

  // Smallest decade of the ladder, and never fewer than three radii.
  const double r_min = moments.front().r;
  std::vector<const Moments*> decade;
  for (const auto& m : moments) {
    if (m.r <= 10.0 * r_min * (1.0 + 1e-12) || decade.size() < 3) decade.push_back(&m);
  }

  TransitionEstimate est;
  for (double gamma : gammas) {
    std::vector<double> logr, logw;
    bool all_negative = true;
    for (const Moments* m : decade) {
      const double w = W_of(*m, gamma, 2.0);
      const double scale = H_of(*m) / std::pow(m->r, kDimension - 1 + 2 * gamma);
      if (!(w < -topts.zero_tolerance * scale)) all_negative = false;
      logr.push_back(std::log(m->r));
      logw.push_back(std::log(std::max(std::abs(w), std::numeric_limits<double>::min())));
    }
    const double slope = least_squares_slope(logr, logw);
    const bool diverging = all_negative && slope < -topts.slope_tolerance;
    est.verdicts.push_back({gamma, diverging, W_of(*decade.front(), gamma, 2.0), slope});
  }

  // Expect bounded ... bounded, diverging ... diverging.
  std::size_t first_div = est.verdicts.size();
  for (std::size_t i = 0; i < est.verdicts.size(); ++i) {
    if (est.verdicts[i].diverging) {
      first_div = i;
      break;
    }
  }
  const double inf = std::numeric_limits<double>::infinity();
  if (first_div == est.verdicts.size()) {
    throw InconclusiveError("W_{gamma,2} stays bounded on the whole gamma grid", gammas.back(), inf);
  }
  if (first_div == 0) {
    throw InconclusiveError("W_{gamma,2} already diverges at the smallest gamma", -inf, gammas.front());
  }
  for (std::size_t i = first_div; i < est.verdicts.size(); ++i) {
    if (!est.verdicts[i].diverging) {
      throw InconclusiveError("bounded/diverging pattern is not monotone in gamma", gammas[first_div - 1],
                              gammas[i]);
    }
  }
  est.lower = gammas[first_div - 1];
  est.upper = gammas[first_div];
  est.estimate = 0.5 * (est.lower + est.upper);
  return est;
}

TransitionEstimate transition_exponent(const PlanarField& field, Vec2 x0, const std::vector<double>& gammas,
                                       const std::vector<double>& radii, const QuadratureOptions& opts,
                                       const TransitionOptions& topts) {
  if (!is_valid_ladder(radii, std::numeric_limits<double>::infinity())) {
    throw Error(ErrorKind::Argument, "transition exponent: ladder must be strictly increasing");
  }
  const auto moments = compute_moments(field, x0, radii, opts);
  const double u0 = std::abs(field.eval(x0));
  if (u0 > topts.eps_u * std::max(moments.back().sphere_max_u, std::numeric_limits<double>::min())) {
    std::ostringstream msg;
    msg << "x0 is not a zero of the field (|u(x0)| = " << u0 << ")";
    throw Error(ErrorKind::Precondition, msg.str());
  }
  return transition_exponent(moments, gammas, topts);
}

}  // namespace nodallab
