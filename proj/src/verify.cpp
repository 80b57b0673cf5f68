#include "nodallab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <tuple>

#include "nodallab/circle.hpp"
#include "nodallab/error.hpp"
#include "nodallab/functionals.hpp"
#include "nodallab/nodal.hpp"
#include "nodallab/order.hpp"
#include "parallel.hpp"

namespace nodallab::verify {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Check at_most(std::string name, double measured, double tolerance, std::string detail = {}) {
  return {std::move(name), std::isfinite(measured) && measured <= tolerance, measured, tolerance, std::move(detail)};
}

Check holds(std::string name, bool ok, std::string detail = {}) {
  return {std::move(name), ok, ok ? 1.0 : 0.0, 1.0, std::move(detail)};
}

struct Config3 {
  double q, lp, lm;
  int k;
  ProblemParams params() const { return {q, lp, lm}; }
  std::string tag() const {
    std::ostringstream s;
    s << "q=" << q << " lp=" << lp << " lm=" << lm << " k=" << k;
    return s.str();
  }
};

// q in {1, 1.5}, (λ₊, λ₋) in {(1,1), (1,4)}, k in {k_bar + 1, k_bar + 3}.
std::vector<Config3> family() {
  std::vector<Config3> out;
  for (double q : {1.0, 1.5}) {
    for (auto [lp, lm] : {std::pair{1.0, 1.0}, std::pair{1.0, 4.0}}) {
      const int kb = k_bar(ProblemParams(q, lp, lm));
      for (int dk : {1, 3}) out.push_back({q, lp, lm, kb + dk});
    }
  }
  return out;
}

// Harmonic monomials r^d cos dθ with the nonlinearity switched off.
struct Monomial {
  double q;
  int d;
  PlanarField field() const { return fields::monomial(d, ProblemParams(q, 1.0, 1.0, 0.0)); }
  std::string tag() const { return "r^" + std::to_string(d) + " cos " + std::to_string(d) + "θ (q=" + g(q) + ")"; }
};

std::vector<Monomial> monomials(bool up_to_beta) {
  std::vector<Monomial> out;
  for (double q : {1.0, 1.5}) {
    const int top = up_to_beta ? beta_q(ProblemParams(q, 1.0, 1.0)) : 3;
    for (int d = 1; d <= top; ++d) out.push_back({q, d});
  }
  return out;
}

// The same ratio from the profile alone. The integrand has kinks at the zeros
// of φ, so integrate piecewise between nodes and zeros with Gauss-Legendre.
double polar_frequency(const ProblemParams& p, const AngularProfile& prof) {
  static constexpr double x5[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                   0.9061798459386640};
  static constexpr double w5[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                   0.2369268850561891};
  const double gm = gamma_q(p);
  std::vector<double> cuts;
  for (std::size_t j = 0; j < prof.size(); ++j) cuts.push_back(prof.node(j));
  for (double z : profile_zero_structure(prof).zeros) cuts.push_back(z);
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(cuts.front() + 2.0 * std::numbers::pi);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1], half = 0.5 * (b - a), mid = 0.5 * (a + b);
    if (!(half > 0.0)) continue;
    for (int j = 0; j < 5; ++j) {
      const double th = mid + half * x5[j];
      const double f = prof.value_at(th), df = prof.derivative_at(th);
      num += half * w5[j] * (df * df + gm * gm * f * f - p.potential(f));
      den += half * w5[j] * f * f;
    }
  }
  return num / (2.0 * gm * den);
}

class Context {
 public:
  explicit Context(const Config& c) : config(c), started(Clock::now()) {}

  std::shared_ptr<const MatchingResult> construct(const Config3& c) {
    return construct(c, config.arc_nodes);
  }

  std::shared_ptr<const MatchingResult> construct(const Config3& c, std::size_t nodes) {
    const auto key = std::make_tuple(c.q, c.lp, c.lm, c.k, nodes);
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    ConstructOptions opts;
    opts.arc_nodes = nodes;
    auto result = construct_uk(c.params(), c.k, opts);
    if (config.perturb != 0.0) {
      // Fault injection: a smooth relative perturbation of the profile.
      const double a = config.perturb * result.profile.scale();
      std::vector<double> v = result.profile.values(), d = result.profile.derivative();
      for (std::size_t j = 0; j < v.size(); ++j) {
        const double th = result.profile.node(j);
        v[j] += a * std::sin(3.0 * th);
        d[j] += 3.0 * a * std::cos(3.0 * th);
      }
      result.profile = AngularProfile(std::move(v), std::move(d), result.params);
      result.energy_drift = energy_drift(result.params, result.profile);
    }
    auto ptr = std::make_shared<const MatchingResult>(std::move(result));
    std::lock_guard lock(mutex_);
    return cache_.emplace(key, ptr).first->second;
  }

  void prefetch(const std::vector<Config3>& list) {
    detail::parallel_for(list.size(), config.jobs, [&](std::size_t i) { construct(list[i]); });
  }

  QuadratureOptions quadrature() const {
    QuadratureOptions q;
    q.jobs = config.jobs;
    return q;
  }

  const Config& config;
  const Clock::time_point started;

 private:
  std::mutex mutex_;
  std::map<std::tuple<double, double, double, int, std::size_t>, std::shared_ptr<const MatchingResult>> cache_;
};

// 1 ---------------------------------------------------------------------------
void frequency(Context& ctx, Criterion& c) {
  const auto fam = family();
  ctx.prefetch(fam);
  // |u|^q and (∂_θ u)² are only C^0/C^1 across the nodal rays, which holds
  // the θ trapezoid rule to second order; 16384 nodes put it near 1e-7.
  auto quad = ctx.quadrature();
  quad.theta_nodes = 16384;
  for (const auto& cfg : fam) {
    const auto r = ctx.construct(cfg);
    const double gm = gamma_q(r->params);
    const double n_quad = eval_Nt(r->field(), {0.0, 0.0}, 1.0, r->params.q(), quad);
    const double n_polar = polar_frequency(r->params, r->profile);
    c.checks.push_back(at_most("N_q = gamma_q [" + cfg.tag() + "]", std::abs(n_quad - gm) / gm, 1e-3,
                               "N_q=" + g(n_quad) + " gamma_q=" + g(gm)));
    c.checks.push_back(at_most("quadrature vs polar [" + cfg.tag() + "]", std::abs(n_quad - n_polar) / std::abs(n_polar),
                               1e-6, "polar=" + g(n_polar)));
  }
}

// 2 ---------------------------------------------------------------------------
void nodal(Context& ctx, Criterion& c) {
  std::vector<Config3> list;
  for (int k = 5; k <= 10; ++k) list.push_back({1.0, 1.0, 1.0, k});
  ctx.prefetch(list);
  double previous = 0.0;
  bool increasing = true;
  std::string lengths;
  for (const auto& cfg : list) {
    const auto r = ctx.construct(cfg);
    const auto zeros = profile_zero_structure(r->profile);
    c.checks.push_back(holds("2k zeros [" + cfg.tag() + "]", zeros.zeros.size() == 2u * static_cast<std::size_t>(cfg.k),
                             std::to_string(zeros.zeros.size()) + " zeros"));
    const auto set = extract_nodal_set(r->field(), ctx.config.grid, 0.5, ctx.config.jobs);
    const double len = nodal_length(set, 0.5);
    c.checks.push_back(at_most("length in B_1/2 = k [" + cfg.tag() + "]", std::abs(len - cfg.k) / cfg.k, 0.05,
                               "length=" + g(len)));
    increasing = increasing && len > previous;
    previous = len;
    lengths += (lengths.empty() ? "" : " ") + g(len);
  }
  c.checks.push_back(holds("length strictly increasing in k", increasing, lengths));
}

// 3 ---------------------------------------------------------------------------
void conservation(Context& ctx, Criterion& c) {
  const auto fam = family();
  ctx.prefetch(fam);
  for (const auto& cfg : fam) {
    const auto r = ctx.construct(cfg);
    c.checks.push_back(at_most("profile energy drift [" + cfg.tag() + "]", r->energy_drift, 1e-6));
  }
  std::mt19937_64 rng(ctx.config.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (double q : {1.0, 1.5}) {
    for (int i = 0; i < 5; ++i) {
      const double w0 = unit(rng), w1 = unit(rng);
      const auto traj = hamiltonian_cauchy(ProblemParams(q, 1.0, 2.0), w0, w1, 1e-3, 10000);
      c.checks.push_back(at_most("RK4 Hamiltonian drift [q=" + g(q) + " w0=" + g(w0) + " w0'=" + g(w1) + "]",
                                 traj.drift, 1e-6, std::to_string(traj.crossings) + " zero crossings"));
    }
  }
}

// 4 ---------------------------------------------------------------------------
void monotonicity(Context& ctx, Criterion& c) {
  const auto fam = family();
  ctx.prefetch(fam);
  const auto ladder = geometric_ladder(0.02, 1.0, 50);
  auto scan = [&](const PlanarField& f, const std::string& tag) {
    const auto moments = compute_moments(f, {0.0, 0.0}, ladder, ctx.quadrature());
    const double gm = gamma_q(f.params());
    for (double dg : {0.0, 0.5, 1.0}) {
      const auto v = monotonicity_scan(moments, f.params(), gm + dg);
      c.checks.push_back(holds("W nondecreasing, gamma=" + g(gm + dg) + " [" + tag + "]", v.monotone,
                               "worst drop " + g(v.worst_drop) + " tol units"));
    }
    return moments;
  };
  for (const auto& cfg : fam) {
    const auto r = ctx.construct(cfg);
    const auto moments = scan(r->field(), cfg.tag());
    const auto trace = sample_trace(moments, {FunctionalKind::W, gamma_q(r->params), 2.0});
    c.checks.push_back(at_most("W_{gamma_q,2} constant [" + cfg.tag() + "]", trace.relative_spread(), 1e-4));
  }
  for (const auto& m : monomials(false)) scan(m.field(), m.tag());
}

// 5 ---------------------------------------------------------------------------
void identities(Context& ctx, Criterion& c) {
  const auto fam = family();
  ctx.prefetch(fam);
  const auto ladder = linear_ladder(0.1, 0.9, 9);
  auto run = [&](const PlanarField& f, const std::string& tag, double tol) {
    const double gm = gamma_q(f.params()), q = f.params().q();
    for (double gamma : {gm, gm + 0.5}) {
      for (double t : {q, 2.0}) {
        const auto rep = check_derivative_identities(f, {0.0, 0.0}, ladder, gamma, t, ctx.quadrature());
        const std::string where = " gamma=" + g(gamma) + " t=" + g(t) + " [" + tag + "]";
        c.checks.push_back(at_most("H' residual" + where, rep.max_h_residual, tol));
        c.checks.push_back(at_most("W' residual" + where, rep.max_w_residual, tol));
      }
    }
  };
  for (const auto& cfg : fam) run(ctx.construct(cfg)->field(), cfg.tag(), 1e-3);
  for (const auto& m : monomials(false)) run(m.field(), m.tag(), 1e-6);
}

// 6 ---------------------------------------------------------------------------
struct OrderCase {
  PlanarField field;
  double order;
  std::string tag;
};

std::vector<OrderCase> order_cases(Context& ctx) {
  std::vector<OrderCase> out;
  for (const auto& m : monomials(true)) out.push_back({m.field(), static_cast<double>(m.d), m.tag()});
  const auto fam = family();
  ctx.prefetch(fam);
  for (const auto& cfg : fam) {
    const auto r = ctx.construct(cfg);
    out.push_back({r->field(), gamma_q(r->params), "u_k " + cfg.tag()});
  }
  return out;
}

void order(Context& ctx, Criterion& c) {
  OrderOptions opts;
  opts.quadrature = ctx.quadrature();
  const auto ladder = dyadic_ladder(0.9, 10);
  for (const auto& oc : order_cases(ctx)) {
    const auto est = estimate_order(oc.field, {0.0, 0.0}, ladder, opts);
    c.checks.push_back(holds("snaps to " + g(oc.order) + " [" + oc.tag + "]", est.snapped && *est.snapped == oc.order,
                             est.snapped ? "snapped " + g(*est.snapped) : "inconclusive"));
    c.checks.push_back(at_most("raw slope [" + oc.tag + "]", std::abs(est.raw_slope - oc.order), 0.05,
                               "raw=" + g(est.raw_slope)));
    c.checks.push_back(at_most("H1 order agrees [" + oc.tag + "]", std::abs(est.h1_slope - est.raw_slope), 0.05,
                               "h1 slope=" + g(est.h1_slope)));
    // Decade-over-decade: ratio(r/10) / ratio(r) >= 0.9.
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < est.radii.size(); ++i) {
      for (std::size_t j = i; j-- > 0;) {
        if (est.radii[j] <= est.radii[i] / 10.0) {
          worst = std::min(worst, est.nondegeneracy[j] / est.nondegeneracy[i]);
          break;
        }
      }
    }
    c.checks.push_back(holds("nondegeneracy bounded below [" + oc.tag + "]",
                             est.nondegeneracy_ratio > 0.0 && worst >= 0.9,
                             "min ratio " + g(est.nondegeneracy_ratio) + ", worst decade factor " + g(worst)));
  }
}

// 7 ---------------------------------------------------------------------------
void transition(Context& ctx, Criterion& c) {
  const auto ladder = geometric_ladder(1e-3, 0.9, 40);
  for (const auto& oc : order_cases(ctx)) {
    const auto gammas = gamma_grid(0.5, gamma_q(oc.field.params()) + 1.0, 0.05);
    try {
      const auto est = transition_exponent(oc.field, {0.0, 0.0}, gammas, ladder, ctx.quadrature());
      c.checks.push_back(at_most("transition exponent [" + oc.tag + "]", std::abs(est.estimate - oc.order), 0.05,
                                 "bracket [" + g(est.lower) + ", " + g(est.upper) + "]"));
    } catch (const InconclusiveError& e) {
      c.checks.push_back(holds("transition exponent [" + oc.tag + "]", false, e.what()));
    }
  }
}

// 8 ---------------------------------------------------------------------------
void matching(Context& ctx, Criterion& c) {
  const auto fam = family();
  ctx.prefetch(fam);
  for (const auto& cfg : fam) {
    const auto r = ctx.construct(cfg);
    if (cfg.lp == cfg.lm) {
      c.checks.push_back(at_most("t_bar = T/2 [" + cfg.tag() + "]", std::abs(r->t_bar - 0.5 * r->T), 1e-6));
    }
    const double lo = psi(cfg.params(), cfg.k, 0.05 * r->T, ctx.config.arc_nodes);
    const double hi = psi(cfg.params(), cfg.k, 0.95 * r->T, ctx.config.arc_nodes);
    c.checks.push_back(holds("Psi(0.05T) > 0 > Psi(0.95T) [" + cfg.tag() + "]", lo > 0.0 && hi < 0.0,
                             "Psi=" + g(lo) + ", " + g(hi)));
  }
}

// 9 ---------------------------------------------------------------------------
void recurrences(Context&, Criterion& c) {
  // Judged on the gaps gamma_q - beta_k: the terms themselves round to
  // gamma_q in double precision well before k = 60.
  for (double q : {1.2, 1.5, 1.75}) {
    const ProblemParams p(q, 1.0, 1.0);
    const double gm = gamma_q(p), frac = gm - std::floor(gm);
    const auto gap = beta_k_gaps(p, 60);
    bool inc = true, below = true, nonint = true;
    for (std::size_t i = 0; i < gap.size(); ++i) {
      const double x = gap[i] - frac;
      nonint = nonint && std::abs(x - std::round(x)) > 4.0 * std::numeric_limits<double>::epsilon() * std::max(gap[i], frac);
      below = below && gap[i] > 0.0;
      if (i > 0) inc = inc && gap[i] < gap[i - 1];
    }
    c.checks.push_back(holds("beta_k increasing [q=" + g(q) + "]", inc));
    c.checks.push_back(holds("beta_k < gamma_q [q=" + g(q) + "]", below));
    c.checks.push_back(holds("beta_k non-integer [q=" + g(q) + "]", nonint));
    c.checks.push_back(at_most("beta_60 -> gamma_q [q=" + g(q) + "]", gap.back(), 1e-3));
  }
  for (double q : {1.0, 1.2, 1.5, 1.75}) {
    const ProblemParams p(q, 1.0, 1.0);
    const auto sigma = sigma_k_sequence(p, 60);
    bool inc = true, bound = true;
    for (std::size_t i = 1; i < sigma.size(); ++i) {
      inc = inc && sigma[i] > sigma[i - 1];
      bound = bound && sigma[i] < (2.0 + q * sigma[i - 1]) / 2.0;
    }
    c.checks.push_back(holds("sigma_k increasing [q=" + g(q) + "]", inc));
    c.checks.push_back(holds("sigma_k < (2 + q sigma_{k-1})/2 [q=" + g(q) + "]", bound));
    if (q <= 1.5) {
      c.checks.push_back(at_most("sigma_60 -> gamma_q [q=" + g(q) + "]", std::abs(sigma.back() - gamma_q(p)), 1e-3));
    }
  }
}

// 10 --------------------------------------------------------------------------
void singular(Context& ctx, Criterion& c) {
  const auto fam = family();
  ctx.prefetch(fam);
  for (const auto& cfg : fam) {
    const auto r = ctx.construct(cfg);
    auto set = extract_nodal_set(r->field(), ctx.config.grid, 1.0, ctx.config.jobs);
    const auto points = detect_singular(r->field(), set);
    const bool origin = points.size() == 1 && norm(points[0].position) <= 2.0 * set.spacing();
    std::string where;
    for (const auto& p : points) where += "(" + g(p.position.x) + "," + g(p.position.y) + ") ";
    c.checks.push_back(holds("only the origin is singular [" + cfg.tag() + "]", origin,
                             std::to_string(points.size()) + " clusters " + where));
    const auto zeros = profile_zero_structure(r->profile);
    c.checks.push_back(holds("min |phi'| at zeros > 1e-3 scale [" + cfg.tag() + "]",
                             zeros.min_abs_slope > 1e-3 * r->profile.scale(),
                             "min |phi'|=" + g(zeros.min_abs_slope) + " scale=" + g(r->profile.scale())));
  }
}

// 11 --------------------------------------------------------------------------
Check richardson(const std::string& name, const std::vector<double>& v, double nominal) {
  std::string detail;
  bool ok = v.size() >= 3;
  double worst = 0.0;
  for (std::size_t i = 0; i + 2 < v.size(); ++i) {
    const double ratio = (v[i] - v[i + 1]) / (v[i + 1] - v[i + 2]);
    detail += (detail.empty() ? "ratios " : ", ") + g(ratio);
    const double off = std::abs(ratio - nominal) / nominal;
    worst = std::max(worst, std::isfinite(off) ? off : 1e300);
  }
  return {name, ok && worst <= 0.3, worst, 0.3, detail + " (nominal " + g(nominal) + ")"};
}

void convergence(Context& ctx, Criterion& c) {
  const Config3 cfg{1.0, 1.0, 4.0, 5};
  std::vector<double> tbar;
  for (std::size_t n : {255u, 511u, 1023u, 2047u}) tbar.push_back(ctx.construct(cfg, n)->t_bar);
  c.checks.push_back(richardson("t_bar second order [" + cfg.tag() + "]", tbar, 4.0));

  const auto u5 = ctx.construct({1.0, 1.0, 1.0, 5});
  std::vector<double> len;
  for (std::size_t cells : {64u, 128u, 256u, 512u}) {
    len.push_back(nodal_length(extract_nodal_set(u5->field(), cells, 0.5, ctx.config.jobs), 0.5));
  }
  c.checks.push_back(richardson("nodal length first order [q=1 lp=1 lm=1 k=5]", len, 2.0));

  const double elapsed = seconds_since(ctx.started);
  c.checks.push_back(at_most("suite wall-clock (s)", elapsed, 600.0));
}

struct Suite {
  const char* name;
  const char* title;
  void (*run)(Context&, Criterion&);
};

const Suite kSuites[] = {
    {"frequency", "frequency identity of the constructed solutions", frequency},
    {"nodal", "2k zeros and growing nodal length", nodal},
    {"conservation", "energy and Hamiltonian conservation", conservation},
    {"monotonicity", "Weiss monotonicity and constancy", monotonicity},
    {"identities", "derivative identities for H and W", identities},
    {"order", "order classification and non-degeneracy", order},
    {"transition", "transition exponent matches the order", transition},
    {"matching", "matching-point symmetry and Psi sign pattern", matching},
    {"recurrences", "beta_k and sigma_k recurrences", recurrences},
    {"singular", "singular set of homogeneous solutions", singular},
    {"convergence", "grid convergence order and run time", convergence},
};

}  // namespace

bool Criterion::pass() const {
  if (!error.empty() || checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

bool Report::all_pass() const {
  return !criteria.empty() && std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.pass(); });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& s : kSuites) v.emplace_back(s.name);
    return v;
  }();
  return names;
}

Report run(const Config& config, const std::function<void(const Criterion&)>& on_done) {
  for (const auto& s : config.suites) {
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), s) == names.end()) {
      throw Error(ErrorKind::Argument, "unknown verification suite '" + s + "'");
    }
  }
  Context ctx(config);
  Report report;
  int id = 0;
  for (const auto& s : kSuites) {
    ++id;
    if (!config.suites.empty() && std::find(config.suites.begin(), config.suites.end(), s.name) == config.suites.end()) {
      continue;
    }
    Criterion c;
    c.id = id;
    c.suite = s.name;
    c.title = s.title;
    const auto t0 = Clock::now();
    try {
      s.run(ctx, c);
    } catch (const std::exception& e) {
      c.error = e.what();
    }
    c.seconds = seconds_since(t0);
    if (on_done) on_done(c);
    report.criteria.push_back(std::move(c));
  }
  report.seconds = seconds_since(ctx.started);
  return report;
}

std::string summary_line(const Criterion& c) {
  std::ostringstream out;
  out << (c.pass() ? "[PASS] " : "[FAIL] ") << c.id << ' ' << c.suite << ": " << c.title << " (" << c.checks.size()
      << " checks, " << g(c.seconds) << " s)";
  if (!c.error.empty()) out << "\n    error: " << c.error;
  for (const auto& k : c.checks) {
    if (!k.pass) out << "\n    failed: " << k.name << " measured " << g(k.measured) << " tol " << g(k.tolerance)
                     << (k.detail.empty() ? "" : " (" + k.detail + ")");
  }
  return out.str();
}

report::Json to_json(const Report& r) {
  using report::Json;
  Json crit = Json::array();
  for (const auto& c : r.criteria) {
    Json checks = Json::array();
    for (const auto& k : c.checks) {
      checks.push_back(Json{{"name", k.name},
                            {"pass", k.pass},
                            {"measured", std::isfinite(k.measured) ? Json(k.measured) : Json(nullptr)},
                            {"tolerance", k.tolerance},
                            {"detail", k.detail}});
    }
    Json j{{"id", c.id}, {"suite", c.suite}, {"title", c.title}, {"pass", c.pass()}, {"checks", checks}};
    if (!c.error.empty()) j["error"] = c.error;
    crit.push_back(j);
  }
  return Json{{"all_pass", r.all_pass()}, {"criteria", crit}};
}

}  // namespace nodallab::verify
