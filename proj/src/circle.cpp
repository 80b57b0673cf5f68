#include "nodallab/circle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nodallab/error.hpp"

namespace nodallab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double hermite_value(double y0, double d0, double y1, double d1, double h, double s) {
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1;
}

double hermite_slope(double y0, double d0, double y1, double d1, double h, double s) {
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * y0 + (-6 * s2 + 6 * s) * y1) / h + (3 * s2 - 4 * s + 1) * d0 + (3 * s2 - 2 * s) * d1;
}

// Solves the symmetric tridiagonal system (diag, off) x = rhs in place;
// off[i] couples unknowns i and i+1.
void thomas_solve(std::vector<double> diag, const std::vector<double>& off, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = off[i - 1] / diag[i - 1];
    diag[i] -= m * off[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / diag[i];
}

constexpr double kGaussX[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
constexpr double kGaussW[4] = {0.3626837833783620, 0.3137066278922041, 0.2223810344533745, 0.1012285362903763};

template <class F>
double gauss01(F&& f) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    s += 0.5 * kGaussW[i] * (f(0.5 * (1.0 - kGaussX[i])) + f(0.5 * (1.0 + kGaussX[i])));
  }
  return s;
}

// Per-cell integrals of g(s) = γ² s + Λ s^{q-1} against the hat weights,
// with ψ linear from a (u = 0) to b (u = 1) and both ends >= 0.
struct CellLoad {
  double A;     // ∫ (1-u) g(ψ)
  double dA_a;  // ∂A/∂a
  double dA_b;  // ∂A/∂b
};

// The positive branch ψ = ±φ of one arc: -ψ'' - γ²ψ = Λ ψ^{q-1}, ψ(ends) = 0,
// discretized with piecewise linear elements and exactly integrated energy
// terms. The load next to a zero is then integrated rather than sampled,
// which keeps nodal values and recovered slopes second order when q > 1.
class ArcProblem {
 public:
  ArcProblem(double q, double gamma, double lambda, double h, std::size_t n)
      : q_(q), g2_(gamma * gamma), lambda_(lambda), h_(h), n_(n) {}

  CellLoad load(double a, double b) const {
    CellLoad c{g2_ * (a / 3.0 + b / 6.0), g2_ / 3.0, g2_ / 6.0};
    if (q_ == 1.0) {
      c.A += 0.5 * lambda_;
      return c;
    }
    const double p = q_ - 1.0;
    if (a <= 0.0 && b <= 0.0) return c;
    if (a <= 0.0) {
      // ψ = b u: Beta integrals.
      c.A += lambda_ * std::pow(b, p) / (q_ * (q_ + 1.0));
      c.dA_b += lambda_ * p * std::pow(b, p - 1.0) / (q_ * (q_ + 1.0));
      c.dA_a += lambda_ * 2.0 * std::pow(b, p - 1.0) / (q_ * (q_ + 1.0));
      return c;
    }
    if (b <= 0.0) {
      // ψ = a (1-u).
      c.A += lambda_ * std::pow(a, p) / (q_ + 1.0);
      c.dA_a += lambda_ * p * std::pow(a, p - 1.0) / (q_ + 1.0);
      c.dA_b += lambda_ * p * std::pow(a, p - 1.0) / (q_ * (q_ + 1.0));
      return c;
    }
    auto psi = [&](double u) { return a * (1.0 - u) + b * u; };
    c.A += lambda_ * gauss01([&](double u) { return (1.0 - u) * std::pow(psi(u), p); });
    c.dA_a += lambda_ * p * gauss01([&](double u) { return (1.0 - u) * (1.0 - u) * std::pow(psi(u), p - 1.0); });
    c.dA_b += lambda_ * p * gauss01([&](double u) { return (1.0 - u) * u * std::pow(psi(u), p - 1.0); });
    return c;
  }

  // Interior unknowns only; the zero endpoints are implicit.
  double at(const std::vector<double>& psi, std::ptrdiff_t i) const {
    return (i < 0 || i >= static_cast<std::ptrdiff_t>(n_)) ? 0.0 : psi[static_cast<std::size_t>(i)];
  }

  // Gradient of J divided by h.
  std::vector<double> residual(const std::vector<double>& psi) const {
    std::vector<double> r(n_);
    const double ih2 = 1.0 / (h_ * h_);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto k = static_cast<std::ptrdiff_t>(i);
      const double l = at(psi, k - 1), c = psi[i], rr = at(psi, k + 1);
      r[i] = (-l + 2.0 * c - rr) * ih2 - load(c, rr).A - load(c, l).A;
    }
    return r;
  }

  // Quadratic part (Dirichlet minus γ² mass) and potential part of J.
  std::pair<double, double> energy_parts(const std::vector<double>& psi) const {
    double quad = 0.0, pot = 0.0;
    for (std::ptrdiff_t i = -1; i < static_cast<std::ptrdiff_t>(n_); ++i) {
      const double a = at(psi, i), b = at(psi, i + 1);
      const double d = (b - a) / h_;
      quad += 0.5 * d * d * h_ - 0.5 * g2_ * h_ * (a * a + a * b + b * b) / 3.0;
      if (a <= 0.0 && b <= 0.0) continue;
      double cell;
      if (a <= 0.0 || b <= 0.0) {
        cell = std::pow(std::max(a, b), q_) / (q_ + 1.0);
      } else {
        cell = gauss01([&](double u) { return std::pow(a * (1.0 - u) + b * u, q_); });
      }
      pot += lambda_ / q_ * h_ * cell;
    }
    return {quad, pot};
  }

  double energy(const std::vector<double>& psi) const {
    const auto [quad, pot] = energy_parts(psi);
    return quad - pot;
  }

  double equation_scale(const std::vector<double>& psi) const {
    const double m = *std::max_element(psi.begin(), psi.end());
    return lambda_ * (q_ == 1.0 ? 1.0 : std::pow(std::max(m, 0.0), q_ - 1.0)) + g2_ * m;
  }

  double roundoff_floor(const std::vector<double>& psi) const {
    const double m = *std::max_element(psi.begin(), psi.end());
    return 16.0 * kEps * (4.0 * m / (h_ * h_) + equation_scale(psi));
  }

  std::vector<double> newton_step(const std::vector<double>& psi, const std::vector<double>& r) const {
    std::vector<double> diag(n_), off(n_ > 0 ? n_ - 1 : 0);
    const double ih2 = 1.0 / (h_ * h_);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto k = static_cast<std::ptrdiff_t>(i);
      const auto right = load(psi[i], at(psi, k + 1));
      diag[i] = 2.0 * ih2 - right.dA_a - load(psi[i], at(psi, k - 1)).dA_a;
      if (i + 1 < n_) off[i] = -ih2 - right.dA_b;
    }
    std::vector<double> step(r.size());
    for (std::size_t i = 0; i < n_; ++i) step[i] = -r[i];
    thomas_solve(std::move(diag), off, step);
    return step;
  }

  // φ' at node i of the padded array from the Taylor identity with the
  // equation substituted for ψ'' on the two adjacent cells.
  double slope(const std::vector<double>& padded, std::size_t i) const {
    if (i == 0) return padded[1] / h_ + h_ * load(0.0, padded[1]).A;
    if (i == n_ + 1) return -padded[n_] / h_ - h_ * load(0.0, padded[n_]).A;
    return (padded[i + 1] - padded[i - 1]) / (2.0 * h_) +
           0.5 * h_ * (load(padded[i], padded[i + 1]).A - load(padded[i], padded[i - 1]).A);
  }

 private:
  double q_, g2_, lambda_, h_;
  std::size_t n_;
};

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double norm_inf(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

// Minimizes c ↦ J(c ψ̂) on [0, hi] by golden-section search.
double golden_section(const ArcProblem& problem, const std::vector<double>& shape, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto J = [&](double c) {
    std::vector<double> v(shape.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = c * shape[i];
    return problem.energy(v);
  };
  double a = 0.0, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = J(c), fd = J(d);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * hi; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = J(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = J(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double ArcMinimizer::value_at(double theta) const noexcept {
  const double h = spacing();
  double x = (theta - a) / h;
  x = std::clamp(x, 0.0, static_cast<double>(n + 1));
  auto i = std::min(static_cast<std::size_t>(x), n);
  return hermite_value(values[i], slopes[i], values[i + 1], slopes[i + 1], h, x - static_cast<double>(i));
}

double ArcMinimizer::slope_at(double theta) const noexcept {
  const double h = spacing();
  double x = (theta - a) / h;
  x = std::clamp(x, 0.0, static_cast<double>(n + 1));
  auto i = std::min(static_cast<std::size_t>(x), n);
  return hermite_slope(values[i], slopes[i], values[i + 1], slopes[i + 1], h, x - static_cast<double>(i));
}

double ArcMinimizer::dirichlet_energy() const noexcept {
  const double h = spacing();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double d = (values[i + 1] - values[i]) / h;
    s += d * d * h;
  }
  return s;
}

ArcMinimizer minimize_arc(const ProblemParams& params, double t, double T, ArcSide side, std::size_t n,
                          const ArcOptions& opts) {
  const double gamma = gamma_q(params);
  if (n < 4) throw Error(ErrorKind::Argument, "minimize_arc: need at least 4 interior nodes");
  if (!(t > 0.0 && t < T)) throw Error(ErrorKind::Precondition, "minimize_arc: need 0 < t < T");
  if (!(T * gamma < std::numbers::pi)) {
    std::ostringstream msg;
    msg << "minimize_arc: T = " << T << " violates T*gamma_q < pi (J is not coercive); use k > k_bar = "
        << k_bar(params);
    throw Error(ErrorKind::Precondition, msg.str());
  }
  const double lambda =
      params.mu() * (side == ArcSide::Plus ? params.lambda_plus() : params.lambda_minus());
  if (!(lambda > 0.0)) {
    throw Error(ErrorKind::Precondition, "minimize_arc: mu * lambda must be > 0 on the requested side");
  }

  ArcMinimizer arc;
  arc.side = side;
  arc.a = side == ArcSide::Plus ? 0.0 : t;
  arc.b = side == ArcSide::Plus ? t : T;
  arc.n = n;
  const double h = arc.spacing();
  const ArcProblem problem(params.q(), gamma, lambda, h, n);

  // Start on the first eigenfunction, scaled to minimize J along that ray.
  std::vector<double> shape(n);
  for (std::size_t i = 0; i < n; ++i) shape[i] = std::sin(std::numbers::pi * static_cast<double>(i + 1) / static_cast<double>(n + 1));
  const auto [quad, pot] = problem.energy_parts(shape);
  if (!(quad > 0.0)) throw Error(ErrorKind::Resolution, "minimize_arc: discrete quadratic form is not positive");
  const double c_hi = 2.0 * std::pow(pot / quad, 1.0 / (2.0 - params.q()));
  const double c0 = golden_section(problem, shape, c_hi);
  std::vector<double> psi(n);
  for (std::size_t i = 0; i < n; ++i) psi[i] = c0 * shape[i];

  std::ostringstream trace;
  double energy = problem.energy(psi);
  bool converged = false;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const auto r = problem.residual(psi);
    const double rn = norm_inf(r);
    const double tol = std::max(opts.residual_tolerance * problem.equation_scale(psi), problem.roundoff_floor(psi));
    trace << " [" << it << "] |R|=" << rn << " J=" << energy;
    if (rn <= tol) {
      converged = true;
      break;
    }
    const auto step = problem.newton_step(psi, r);
    const double r2 = norm2(r);
    double alpha = 1.0;
    bool accepted = false;
    std::vector<double> trial(n);
    while (alpha > 1e-12) {
      for (std::size_t i = 0; i < n; ++i) {
        trial[i] = psi[i] + alpha * step[i];
        if (!(trial[i] > 0.0)) trial[i] = 0.5 * psi[i];  // sign projection
      }
      if (norm2(problem.residual(trial)) <= (1.0 - 1e-4 * alpha) * r2) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // Line search stalls only at the roundoff level; anything else is divergence.
      if (rn <= 1e3 * tol) {
        converged = true;
        break;
      }
      throw Error(ErrorKind::Solver, "minimize_arc: damped Newton stalled;" + trace.str());
    }
    const double step_size = alpha * norm_inf(step);
    psi.swap(trial);
    energy = problem.energy(psi);
    if (step_size <= 4.0 * kEps * norm_inf(psi)) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) throw Error(ErrorKind::Solver, "minimize_arc: Newton did not converge;" + trace.str());
  if (!(energy < 0.0)) {
    throw Error(ErrorKind::Resolution, "minimize_arc: discrete minimum has J >= 0; increase the number of nodes");
  }

  const double sign = side == ArcSide::Plus ? 1.0 : -1.0;
  arc.values.assign(n + 2, 0.0);
  for (std::size_t i = 0; i < n; ++i) arc.values[i + 1] = sign * psi[i];
  std::vector<double> padded(n + 2, 0.0);
  std::copy(psi.begin(), psi.end(), padded.begin() + 1);
  arc.slopes.resize(n + 2);
  for (std::size_t i = 0; i < n + 2; ++i) arc.slopes[i] = sign * problem.slope(padded, i);
  arc.endpoint_slope = side == ArcSide::Plus ? arc.slopes[n + 1] : arc.slopes[0];
  arc.far_slope = side == ArcSide::Plus ? arc.slopes[0] : arc.slopes[n + 1];
  arc.energy = energy;
  arc.residual = norm_inf(problem.residual(psi)) / problem.equation_scale(psi);
  arc.newton_iterations = it;
  return arc;
}

double psi(const ProblemParams& params, int k, double t, std::size_t n, const ArcOptions& opts) {
  if (k < 1) throw Error(ErrorKind::Argument, "psi: k must be positive");
  const double T = 2.0 * std::numbers::pi / k;
  const auto plus = minimize_arc(params, t, T, ArcSide::Plus, n, opts);
  const auto minus = minimize_arc(params, t, T, ArcSide::Minus, n, opts);
  return plus.endpoint_slope - minus.endpoint_slope;
}

PsiScan scan_psi(const ProblemParams& params, int k, std::size_t n, std::size_t count, double bracket_fraction,
                 const ArcOptions& opts) {
  if (count < 2) throw Error(ErrorKind::Argument, "scan_psi: need at least 2 samples");
  const double T = 2.0 * std::numbers::pi / k;
  const double lo = bracket_fraction * T, hi = (1.0 - bracket_fraction) * T;
  PsiScan scan;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    scan.samples.push_back({t, psi(params, k, t, n, opts)});
  }
  for (std::size_t i = 0; i + 1 < count; ++i) {
    const double a = scan.samples[i].value, b = scan.samples[i + 1].value;
    if ((a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0)) {
      scan.sign_changes.emplace_back(scan.samples[i].t, scan.samples[i + 1].t);
    }
  }
  return scan;
}

PlanarField MatchingResult::field() const { return PlanarField::homogeneous(gamma_q(params), profile, params); }

MatchingResult construct_uk(const ProblemParams& params, int k, const ConstructOptions& opts) {
  const int kb = k_bar(params);
  if (k <= kb) {
    throw Error(ErrorKind::Precondition, "k must exceed k_bar=" + std::to_string(kb) + " (got k=" + std::to_string(k) + ")");
  }
  if (!(params.lambda_minus() > 0.0) || !(params.mu() > 0.0)) {
    throw Error(ErrorKind::Precondition, "construction needs lambda_minus > 0 and mu > 0");
  }
  const double T = 2.0 * std::numbers::pi / k;
  const std::size_t n = opts.arc_nodes;

  auto solve_pair = [&](double t) {
    return std::make_pair(minimize_arc(params, t, T, ArcSide::Plus, n, opts.arc),
                          minimize_arc(params, t, T, ArcSide::Minus, n, opts.arc));
  };
  auto psi_of = [](const std::pair<ArcMinimizer, ArcMinimizer>& arcs) {
    return arcs.first.endpoint_slope - arcs.second.endpoint_slope;
  };

  double lo = opts.bracket_fraction * T, hi = (1.0 - opts.bracket_fraction) * T;
  const double psi_lo = psi_of(solve_pair(lo));
  const double psi_hi = psi_of(solve_pair(hi));
  if (!(psi_lo > 0.0 && psi_hi < 0.0)) {
    std::ostringstream msg;
    msg << "Psi has no sign change on the bracket: Psi(" << lo << ") = " << psi_lo << ", Psi(" << hi
        << ") = " << psi_hi;
    throw Error(ErrorKind::Construction, msg.str());
  }

  int steps = 0;
  auto bisect_once = [&]() {
    const double mid = 0.5 * (lo + hi);
    const double value = psi_of(solve_pair(mid));
    (value > 0.0 ? lo : hi) = mid;
    ++steps;
  };
  while (hi - lo > opts.bracket_tolerance * T) bisect_once();
  double t_bar = 0.5 * (lo + hi);
  auto arcs = solve_pair(t_bar);
  double residual = psi_of(arcs);
  for (int extra = 0; std::abs(residual) >= opts.psi_tolerance && extra < 24; ++extra) {
    bisect_once();
    t_bar = 0.5 * (lo + hi);
    arcs = solve_pair(t_bar);
    residual = psi_of(arcs);
  }
  if (std::abs(residual) >= opts.psi_tolerance) {
    std::ostringstream msg;
    msg << "Psi root not resolved: |Psi(" << t_bar << ")| = " << std::abs(residual);
    throw Error(ErrorKind::Construction, msg.str());
  }

  auto& [plus, minus] = arcs;
  const std::size_t per_tile = (opts.profile_samples + static_cast<std::size_t>(k) - 1) / static_cast<std::size_t>(k);
  const std::size_t n_theta = per_tile * static_cast<std::size_t>(k);
  std::vector<double> cell_v(per_tile), cell_d(per_tile);
  for (std::size_t j = 0; j < per_tile; ++j) {
    const double theta = T * static_cast<double>(j) / static_cast<double>(per_tile);
    const auto& arc = theta <= t_bar ? plus : minus;
    cell_v[j] = j == 0 ? 0.0 : arc.value_at(theta);
    cell_d[j] = arc.slope_at(theta);
  }
  std::vector<double> values(n_theta), deriv(n_theta);
  for (std::size_t tile = 0; tile < static_cast<std::size_t>(k); ++tile) {
    std::copy(cell_v.begin(), cell_v.end(), values.begin() + static_cast<std::ptrdiff_t>(tile * per_tile));
    std::copy(cell_d.begin(), cell_d.end(), deriv.begin() + static_cast<std::ptrdiff_t>(tile * per_tile));
  }

  MatchingResult result{.params = params,
                        .k = k,
                        .T = T,
                        .t_bar = t_bar,
                        .profile = AngularProfile(std::move(values), std::move(deriv), params),
                        .plus = plus,
                        .minus = minus};
  const double slope_scale =
      std::max({std::abs(plus.far_slope), std::abs(minus.far_slope), std::abs(plus.endpoint_slope)});
  result.psi_residual = std::abs(residual);
  result.seam_jump = std::abs(plus.far_slope - minus.far_slope) / slope_scale;
  result.ode_residual = std::max({plus.residual, minus.residual, result.psi_residual / slope_scale, result.seam_jump});
  result.energy_drift = energy_drift(params, result.profile);
  result.bisection_steps = steps;
  return result;
}

FunctionalTrace energy_function(const ProblemParams& params, const AngularProfile& profile) {
  const double g2 = gamma_q(params) * gamma_q(params);
  const double q = params.q();
  FunctionalTrace trace;
  trace.label = "energy";
  trace.radii.resize(profile.size());
  trace.values.resize(profile.size());
  for (std::size_t j = 0; j < profile.size(); ++j) {
    const double phi = profile.values()[j], dphi = profile.derivative()[j];
    trace.radii[j] = profile.node(j);
    trace.values[j] = 0.5 * dphi * dphi + 0.5 * g2 * phi * phi + params.potential(phi) / q;
  }
  return trace;
}

double energy_drift(const ProblemParams& params, const AngularProfile& profile) {
  return energy_function(params, profile).relative_spread();
}

double hamiltonian(const ProblemParams& params, double w, double w_prime) noexcept {
  return 0.5 * w_prime * w_prime + params.potential(w) / params.q();
}

namespace {

struct State {
  double w, v;
};

// RK4 with the right-hand side frozen on one branch (phase = sign of w on
// the current arc), so the integrand is smooth across a single step.
State rk4(const ProblemParams& p, State y, double h, int phase) {
  const double lambda = p.mu() * (phase > 0 ? p.lambda_plus() : p.lambda_minus());
  const double q = p.q();
  auto accel = [&](double w) {
    if (phase == 0) return 0.0;
    const double mag = q == 1.0 ? 1.0 : std::pow(std::abs(w), q - 1.0);
    return -static_cast<double>(phase) * lambda * mag;
  };
  const double k1w = y.v, k1v = accel(y.w);
  const double k2w = y.v + 0.5 * h * k1v, k2v = accel(y.w + 0.5 * h * k1w);
  const double k3w = y.v + 0.5 * h * k2v, k3v = accel(y.w + 0.5 * h * k2w);
  const double k4w = y.v + h * k3v, k4v = accel(y.w + h * k3w);
  return {y.w + h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w), y.v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)};
}

int phase_of(State y) {
  if (y.w > 0.0) return 1;
  if (y.w < 0.0) return -1;
  if (y.v > 0.0) return 1;
  if (y.v < 0.0) return -1;
  return 0;
}

}  // namespace

namespace {

// One RK4 step; when w changes sign the step is cut at the zero, w is set to
// exactly 0 and the unused time is returned.
double step_to_zero(const ProblemParams& p, State& y, double dt, bool& crossed) {
  crossed = false;
  const int phase = phase_of(y);
  const State next = rk4(p, y, dt, phase);
  if (phase == 0 || next.w * phase >= 0.0) {
    y = next;
    return 0.0;
  }
  double a = 0.0, b = dt;
  for (int it = 0; it < 80 && b - a > 4.0 * kEps * dt; ++it) {
    const double m = 0.5 * (a + b);
    (rk4(p, y, m, phase).w * phase > 0.0 ? a : b) = m;
  }
  y = rk4(p, y, b, phase);
  y.w = 0.0;
  crossed = true;
  return dt - b;
}

// Advances by dt. For q > 1 the right-hand side is only Hölder at w = 0 and
// w behaves like s + c s^{q+1} at distance s from a zero. Inside the window
// s < Z, where the singular term is of relative size one, steps shrink like
// dt (s/Z)^{2/3}: the local errors of a cubically graded mesh with Z/dt
// points, which keeps the global error at fourth order.
void advance(const ProblemParams& p, State& y, double dt, std::size_t& crossings, double& since_zero) {
  const double q = p.q();
  const double lambda = p.mu() * std::max(p.lambda_plus(), p.lambda_minus());
  const bool graded = q > 1.0 && lambda > 0.0;
  double left = dt;
  for (int guard = 0; left > 0.0 && guard < 1 << 24; ++guard) {
    double h = dt;
    if (graded && y.v != 0.0) {
      const double window = std::pow(std::pow(std::abs(y.v), 2.0 - q) / lambda, 1.0 / q);
      const double s = std::min(since_zero, std::abs(y.w / y.v));
      if (s < window && dt < window) {
        const double floor = window * std::pow(dt / window, 3.0);
        h = std::max(floor, 3.0 * dt * std::pow(s / window, 2.0 / 3.0));
      }
    }
    h = std::min(h, left);
    bool crossed = false;
    const double done = h - step_to_zero(p, y, h, crossed);
    if (crossed) {
      ++crossings;
      since_zero = 0.0;
    } else {
      since_zero += done;
    }
    left -= done;
    if (left <= 4.0 * kEps * dt) break;
  }
}

}  // namespace

HamiltonianTrajectory hamiltonian_cauchy(const ProblemParams& params, double w0, double w0_prime, double step,
                                         std::size_t steps) {
  if (!(step > 0.0)) throw Error(ErrorKind::Argument, "hamiltonian_cauchy: step must be > 0");
  HamiltonianTrajectory out;
  out.times.reserve(steps + 1);
  State y{w0, w0_prime};
  auto record = [&](double time) {
    out.times.push_back(time);
    out.w.push_back(y.w);
    out.w_prime.push_back(y.v);
    out.hamiltonian.push_back(hamiltonian(params, y.w, y.v));
  };
  record(0.0);
  double since_zero = w0 == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < steps; ++s) {
    advance(params, y, step, out.crossings, since_zero);
    record(step * static_cast<double>(s + 1));
  }
  const auto [lo, hi] = std::minmax_element(out.hamiltonian.begin(), out.hamiltonian.end());
  const double h0 = std::abs(out.hamiltonian.front());
  out.drift = h0 > 0.0 ? (*hi - *lo) / h0 : (*hi - *lo);
  return out;
}

}  // namespace nodallab
