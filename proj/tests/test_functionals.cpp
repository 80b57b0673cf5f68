#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nodallab/circle.hpp"
#include "nodallab/error.hpp"
#include "nodallab/functionals.hpp"

using namespace nodallab;
using std::numbers::pi;

namespace {

const ProblemParams kHarmonic(1.0, 1.0, 1.0, 0.0);

const MatchingResult& u5() {
  static const MatchingResult r = [] {
    ConstructOptions o;
    o.arc_nodes = 1024;
    return construct_uk(ProblemParams(1.0, 1.0, 1.0), 5, o);
  }();
  return r;
}

const MatchingResult& u9() {
  static const MatchingResult r = [] {
    ConstructOptions o;
    o.arc_nodes = 1024;
    return construct_uk(ProblemParams(1.5, 1.0, 2.0), 9, o);
  }();
  return r;
}

}  // namespace

TEST_CASE("H oracles") {
  CHECK(eval_H(fields::constant(1.0, kHarmonic), {0, 0}, 0.5) == doctest::Approx(pi).epsilon(1e-12));
  const auto x1 = fields::linear(kHarmonic);
  CHECK(eval_H(x1, {0, 0}, 1.0) == doctest::Approx(pi).epsilon(1e-12));
  CHECK(eval_H(x1, {0, 0}, 0.25) == doctest::Approx(pi / 64).epsilon(1e-12));
}

TEST_CASE("D_t and N_t oracles") {
  const auto x1 = fields::linear(kHarmonic);
  for (double t : {1.0, 2.0}) {
    CHECK(eval_Dt(x1, {0, 0}, 1.0, t) == doctest::Approx(pi).epsilon(1e-9));
    CHECK(eval_Nt(x1, {0, 0}, 1.0, t) == doctest::Approx(1.0).epsilon(1e-9));
  }
  const auto s = fields::saddle(kHarmonic);
  for (double r : {0.1, 0.5, 1.0}) CHECK(eval_Nt(s, {0, 0}, r, 1.0) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("N_t on a sphere where u vanishes") {
  const auto flat = PlanarField::closed_form("ramp", {Term::ramp(1.0, 0.5)}, kHarmonic);
  try {
    eval_Nt(flat, {0, 0}, 0.25, 1.0);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateSphere);
  }
}

TEST_CASE("W oracles") {
  const auto x1 = fields::linear(kHarmonic);
  for (double r : {0.25, 0.5, 1.0}) CHECK(std::abs(eval_W(x1, {0, 0}, r, 1.0, 2.0)) < 1e-9);
  CHECK(eval_W(x1, {0, 0}, 1.0, 2.0, 2.0) == doctest::Approx(-pi).epsilon(1e-9));
  // W_{γ,2}(x₁) = (1 - γ) π r^{2 - 2γ}
  CHECK(eval_W(x1, {0, 0}, 0.5, 1.5, 2.0) == doctest::Approx(-0.5 * pi * std::pow(0.5, -1.0)).epsilon(1e-9));
}

TEST_CASE("W of constructed solutions is radius-constant at gamma_q") {
  for (const auto* r : {&u5(), &u9()}) {
    const double g = gamma_q(r->params);
    const auto trace = sample_trace(r->field(), {0, 0}, geometric_ladder(0.05, 1.0, 12), {FunctionalKind::W, g, 2.0});
    CHECK(trace.relative_spread() < 1e-4);
    const auto nq = sample_trace(r->field(), {0, 0}, geometric_ladder(0.05, 1.0, 12), {FunctionalKind::Nt, g, r->params.q()});
    CHECK(nq.relative_spread() < 1e-4);
  }
}

TEST_CASE("homogeneous monomials: W and N_q radius-constant") {
  for (int d = 1; d <= 4; ++d) {
    const auto f = fields::monomial(d, ProblemParams(1.5, 1, 1, 0.0));
    const auto ladder = geometric_ladder(0.05, 1.0, 8);
    // W_{d,t} vanishes identically: r^{-2d} ∫_B |∇u|² = d r^{-1-2d} H = dπ
    for (double w : sample_trace(f, {0, 0}, ladder, {FunctionalKind::W, double(d), 2.0}).values) {
      CHECK(std::abs(w) < 1e-9 * d * pi);
    }
    CHECK(sample_trace(f, {0, 0}, ladder, {FunctionalKind::Nt, 0.0, 1.5}).relative_spread() < 1e-4);
  }
}

TEST_CASE("Phi") {
  CHECK(eval_Phi(fields::saddle(kHarmonic), {0, 0}, 0.7, 2.0) == 0.0);
  const auto pos1 = PlanarField::closed_form("r2", {Term::radial(1.0)}, ProblemParams(1.2, 1.0, 1.0));
  const auto pos5 = PlanarField::closed_form("r2", {Term::radial(1.0)}, ProblemParams(1.2, 1.0, 5.0));
  CHECK(eval_Phi(pos1, {0, 0}, 0.7, 2.5) == eval_Phi(pos5, {0, 0}, 0.7, 2.5));
  CHECK(eval_Phi(pos1, {0, 0}, 0.7, 2.5) > 0.0);
  CHECK(eval_Phi(u9().field(), {0.1, 0.0}, 0.3, 4.0) >= 0.0);
}

TEST_CASE("Phi of u_k against a brute-force Riemann sum") {
  const auto& r = u5();
  const auto f = r.field();
  const double g = gamma_q(r.params), q = r.params.q(), rad = 0.5;
  const std::size_t n = 1024;
  const double h = 2.0 * rad / n;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Vec2 x{-rad + h * (i + 0.5), -rad + h * (j + 0.5)};
      if (dot(x, x) <= rad * rad) sum += r.params.potential(f.eval(x)) * h * h;
    }
  }
  const double brute = 4.0 / (q * std::pow(rad, 1.0 + 2.0 * g)) * sum;
  CHECK(eval_Phi(f, {0, 0}, rad, g) == doctest::Approx(brute).epsilon(1e-3));
}

TEST_CASE("H1 norm") {
  CHECK(h1_norm(fields::linear(kHarmonic), {0, 0}, 1.0) == doctest::Approx(std::sqrt(2 * pi)).epsilon(1e-9));
  CHECK(h1_norm(fields::constant(0.0, kHarmonic), {0, 0}, 1.0) == 0.0);
  const auto f = u5().field();
  CHECK(h1_norm(f, {0, 0}, 0.5) == doctest::Approx(std::pow(0.5, 2.0) * h1_norm(f, {0, 0}, 1.0)).epsilon(1e-6));
}

TEST_CASE("derivative identities") {
  const auto x1 = fields::linear(kHarmonic);
  const auto rep = check_derivative_identities(x1, {0, 0}, linear_ladder(0.05, 0.95, 20), 1.0, 2.0);
  CHECK(rep.max_h_residual < 1e-6);
  const auto s = check_derivative_identities(fields::saddle(kHarmonic), {0, 0}, linear_ladder(0.1, 0.9, 9), 2.5, 1.0);
  CHECK(s.max_w_residual < 1e-5);
  CHECK(s.max_wn_residual < 1e-9);
  const auto& r = u9();
  const auto k = check_derivative_identities(r.field(), {0, 0}, linear_ladder(0.1, 0.9, 5), 4.0, 2.0);
  CHECK(k.max_w_residual < 1e-3);
  CHECK(k.max_h_residual < 1e-3);
  // W-vs-N consistency on an off-centre ball, where nothing is homogeneous
  const auto off = check_derivative_identities(u5().field(), {0.2, 0.1}, linear_ladder(0.1, 0.5, 5), 2.3, 1.0);
  CHECK(off.max_wn_residual < 1e-9);
  CHECK(off.max_w_residual < 1e-3);
}

TEST_CASE("Weiss monotonicity") {
  const auto ladder = geometric_ladder(0.02, 1.0, 30);
  const auto& r = u5();
  CHECK(monotonicity_scan(r.field(), {0, 0}, 2.0, ladder).monotone);
  CHECK(monotonicity_scan(r.field(), {0, 0}, 2.5, ladder).monotone);
  CHECK(monotonicity_scan(fields::linear(kHarmonic), {0, 0}, 2.0, ladder).monotone);
  try {
    monotonicity_scan(r.field(), {0, 0}, 1.5, ladder);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Precondition);
  }
}

TEST_CASE("transition exponent") {
  const auto ladder = geometric_ladder(1e-3, 0.9, 40);
  const auto grid = gamma_grid(0.5, 3.0, 0.05);
  CHECK(std::abs(transition_exponent(fields::linear(kHarmonic), {0, 0}, grid, ladder).estimate - 1.0) <= 0.05);
  CHECK(std::abs(transition_exponent(fields::saddle(kHarmonic), {0, 0}, grid, ladder).estimate - 2.0) <= 0.05);
  CHECK(std::abs(transition_exponent(u5().field(), {0, 0}, grid, ladder).estimate - 2.0) <= 0.05);
}
