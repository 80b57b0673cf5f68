#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <tuple>

#include "nodallab/circle.hpp"
#include "nodallab/error.hpp"
#include "nodallab/nodal.hpp"
#include "nodallab/svg.hpp"

using namespace nodallab;
using std::numbers::pi;

namespace {

const ProblemParams kHarmonic(1.0, 1.0, 1.0, 0.0);

}  // namespace

TEST_CASE("length of a diameter") {
  const auto n = extract_nodal_set(fields::linear(kHarmonic), 256);
  const double h = n.spacing();
  CHECK(nodal_length(n, 0.5) == doctest::Approx(1.0).epsilon(2 * h));
  CHECK(nodal_length(n, 1.0) == doctest::Approx(2.0).epsilon(2 * h));
  for (const auto& s : n.segments) {
    CHECK(std::abs(s.a.x) < 1e-12);
    CHECK(std::abs(s.b.x) < 1e-12);
  }
}

TEST_CASE("length of a circle") {
  const auto n = extract_nodal_set(fields::circle(0.5, kHarmonic), 512);
  CHECK(std::abs(nodal_length(n, 1.0) - pi) < 5 * n.spacing());
  CHECK(nodal_length(n, 0.4) == 0.0);
}

TEST_CASE("empty nodal set") {
  auto n = extract_nodal_set(fields::constant(1.0, kHarmonic), 128);
  CHECK(n.segments.empty());
  CHECK(nodal_length(n, 1.0) == 0.0);
  CHECK(detect_singular(fields::constant(1.0, kHarmonic), n).empty());
  CHECK_THROWS_AS(extract_nodal_set(fields::linear(kHarmonic), 32), Error);
}

TEST_CASE("saddle: one singular point and four rays") {
  const auto f = fields::saddle(kHarmonic);
  auto n = extract_nodal_set(f, 256);
  const auto sp = detect_singular(f, n);
  REQUIRE(sp.size() == 1);
  CHECK(norm(sp[0].position) <= n.spacing());
  CHECK(svg::polylines(n).size() == 4);
  CHECK(nodal_length(n, 1.0) == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("regular nodal lines have no singular points") {
  const auto f = fields::linear(kHarmonic);
  auto n = extract_nodal_set(f, 256);
  CHECK(detect_singular(f, n).empty());
  CHECK(svg::polylines(n).size() == 1);
}

TEST_CASE("constructed u_k: 2k rays of length rho") {
  for (auto [q, lp, lm, k] : {std::tuple{1.0, 1.0, 1.0, 5}, std::tuple{1.0, 1.0, 4.0, 8}, std::tuple{1.5, 1.0, 2.0, 9}}) {
    ConstructOptions o;
    o.arc_nodes = 512;
    const auto u = construct_uk(ProblemParams(q, lp, lm), k, o);
    const auto f = u.field();
    auto n = extract_nodal_set(f, 512);
    const double h = n.spacing();
    CHECK(nodal_length(n, 0.5) == doctest::Approx(k).epsilon(0.05));
    const auto sp = detect_singular(f, n);
    REQUIRE(sp.size() == 1);
    CHECK(norm(sp[0].position) < 5 * h);
    CHECK(profile_zero_structure(u.profile).min_abs_slope > 0);
    CHECK(svg::polylines(n).size() == static_cast<std::size_t>(2 * k));
    // A ray is lost only where the thinner wedge is narrower than a cell
    // diagonal, so each falls short of ρ by O(h / wedge angle).
    const double wedge = std::min(u.t_bar, u.T - u.t_bar);
    const double slack = 2 * k * (std::sqrt(2.0) * h / wedge + 2 * h);
    for (double rho : {0.1, 0.2, 0.4, 0.6, 0.8}) {
      const double len = nodal_length(n, rho);
      CHECK(len <= 2 * k * rho * (1 + 1e-3));
      CHECK(len >= 2 * k * rho - slack);
    }
  }
}

TEST_CASE("nodal length grows with k") {
  ConstructOptions o;
  o.arc_nodes = 512;
  const ProblemParams p(1.0, 1.0, 1.0);
  const double l5 = nodal_length(extract_nodal_set(construct_uk(p, 5, o).field(), 512), 0.5);
  const double l8 = nodal_length(extract_nodal_set(construct_uk(p, 8, o).field(), 512), 0.5);
  CHECK(l5 == doctest::Approx(5.0).epsilon(0.05));
  CHECK(l8 == doctest::Approx(8.0).epsilon(0.05));
  CHECK(l8 > l5);
}

TEST_CASE("length error shrinks like 1/n") {
  // an off-lattice circle; the polygon error is second order, the clip error first
  const auto f = fields::circle(0.4321, kHarmonic);
  const double exact = 2 * pi * 0.4321;
  double prev = 1.0;
  for (std::size_t cells : {64, 128, 256, 512}) {
    const double err = std::abs(nodal_length(extract_nodal_set(f, cells), 1.0) - exact);
    CHECK(err < 4.0 / cells);
    CHECK(err <= prev);
    prev = err;
  }
}

TEST_CASE("extraction does not depend on the job count") {
  const auto f = fields::saddle(kHarmonic);
  const auto a = extract_nodal_set(f, 200, 1.0, 1);
  const auto b = extract_nodal_set(f, 200, 1.0, 4);
  REQUIRE(a.segments.size() == b.segments.size());
  for (std::size_t i = 0; i < a.segments.size(); ++i) {
    CHECK(a.segments[i].a == b.segments[i].a);
    CHECK(a.segments[i].b == b.segments[i].b);
  }
}

TEST_CASE("profile zero structure") {
  const auto c2 = AngularProfile::sample(
      256, [](double t) { return std::cos(2 * t); }, [](double t) { return -2 * std::sin(2 * t); });
  const auto z = profile_zero_structure(c2);
  REQUIRE(z.zeros.size() == 4);
  for (int j = 0; j < 4; ++j) CHECK(z.zeros[j] == doctest::Approx(pi / 4 + j * pi / 2).epsilon(1e-10));
  CHECK(z.antipodal);
  CHECK(z.min_abs_slope == doctest::Approx(2.0).epsilon(1e-6));
  CHECK_FALSE(z.degenerate);

  const auto shifted = AngularProfile::sample(
      256, [](double t) { return std::cos(t) + 0.5; }, [](double t) { return -std::sin(t); });
  const auto zs = profile_zero_structure(shifted);
  CHECK(zs.zeros.size() == 2);
  CHECK_FALSE(zs.antipodal);

  const auto zero = AngularProfile::sample(
      64, [](double) { return 0.0; }, [](double) { return 0.0; });
  const auto z0 = profile_zero_structure(zero);
  CHECK(z0.degenerate);
  CHECK(z0.zeros.empty());
}
