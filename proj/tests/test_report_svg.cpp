#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include "nodallab/nodal.hpp"
#include "nodallab/report.hpp"
#include "nodallab/svg.hpp"

using namespace nodallab;

namespace {

const ProblemParams kHarmonic(1.0, 1.0, 1.0, 0.0);

std::size_t count(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (auto pos = s.find(what); pos != std::string::npos; pos = s.find(what, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("parameter and exponent json") {
  const ProblemParams p(1.5, 2.0, 3.0);
  const auto j = report::to_json(p);
  CHECK(j["q"] == 1.5);
  CHECK(j["lambda_minus"] == 3.0);
  const auto d = report::to_json(derived_exponents(p));
  CHECK(d["gamma_q"] == 4.0);
  CHECK(d["beta_q"] == 3);
  CHECK(d["k_bar"] == 8);
  CHECK(d["lambda_nq"] == 16.0);
}

TEST_CASE("non-finite numbers are written as null") {
  FunctionalTrace t{{0.1, 0.2}, {1.0, -std::numeric_limits<double>::infinity()}, "W"};
  const auto text = report::dump(report::to_json(t));
  CHECK(text.find("null") != std::string::npos);
  CHECK(text.back() == '\n');
  const auto back = report::Json::parse(text);
  CHECK(back["values"][1].is_null());
  CHECK(back["label"] == "W");
}

TEST_CASE("order estimate json") {
  OrderEstimate e;
  e.raw_slope = 1.7;
  CHECK(report::to_json(e)["snapped"] == "inconclusive");
  e.snapped = 2.0;
  CHECK(report::to_json(e)["snapped"] == 2.0);
  CHECK(report::to_json(e)["fourier"].is_null());
}

TEST_CASE("error json") {
  const auto j = report::error_json(Error(ErrorKind::Precondition, "k must exceed k_bar=4 (got k=3)"));
  CHECK(j["error"] == to_string(ErrorKind::Precondition));
  CHECK(j["message"] == "k must exceed k_bar=4 (got k=3)");
}

TEST_CASE("profile zeros json") {
  const auto c2 = AngularProfile::sample(
      128, [](double t) { return std::cos(2 * t); }, [](double t) { return -2 * std::sin(2 * t); });
  const auto j = report::to_json(profile_zero_structure(c2));
  CHECK(j["count"] == 4);
  CHECK(j["antipodal"] == true);
}

TEST_CASE("nodal svg") {
  const auto f = fields::saddle(kHarmonic);
  auto n = extract_nodal_set(f, 128);
  detect_singular(f, n);
  const auto s = svg::nodal_svg(n);
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(count(s, "<polyline") == 4);
  CHECK(count(s, "class=\"singular\"") == 1);
  CHECK(s.find("</svg>") != std::string::npos);

  auto empty = extract_nodal_set(fields::constant(1.0, kHarmonic), 64);
  const auto e = svg::nodal_svg(empty);
  CHECK(count(e, "<polyline") == 0);
  CHECK(count(e, "<circle") == 1);
}

TEST_CASE("polylines cover every segment once") {
  const auto f = fields::circle(0.5, kHarmonic);
  const auto n = extract_nodal_set(f, 128);
  const auto chains = svg::polylines(n);
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].size() == n.segments.size() + 1);
  CHECK(chains[0].front() == chains[0].back());
}

TEST_CASE("trace svg") {
  FunctionalTrace pos{{0.01, 0.1, 1.0}, {1e-4, 1e-2, 1.0}, "H<r>"};
  const auto a = svg::trace_svg(pos);
  CHECK(a.find("log10 H&lt;r&gt;") != std::string::npos);
  CHECK(count(a, "<polyline") == 1);

  FunctionalTrace mixed{{0.01, 0.1, 1.0}, {-1.0, 0.0, 1.0}, "W"};
  const auto b = svg::trace_svg(mixed);
  CHECK(b.find("log10 W") == std::string::npos);

  FunctionalTrace flat{{0.1, 1.0}, {2.0, 2.0}, "N"};
  CHECK(count(svg::trace_svg(flat), "<polyline") == 1);

  FunctionalTrace bad{{0.1, 1.0}, {1.0}, "x"};
  CHECK_THROWS_AS(svg::trace_svg(bad), Error);
}
