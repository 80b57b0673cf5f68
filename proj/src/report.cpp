#include "nodallab/report.hpp"

#include <cmath>

namespace nodallab::report {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const ProblemParams& params) {
  return Json{{"q", params.q()},
              {"lambda_plus", params.lambda_plus()},
              {"lambda_minus", params.lambda_minus()},
              {"mu", params.mu()}};
}

Json to_json(const DerivedExponents& d) {
  return Json{{"gamma_q", d.gamma_q}, {"beta_q", d.beta_q}, {"lambda_nq", d.lambda_nq}, {"k_bar", d.k_bar}};
}

Json to_json(const MatchingResult& r, const std::string& profile_path) {
  Json j{{"k", r.k},
         {"T", r.T},
         {"t_bar", r.t_bar},
         {"psi_residual", number(r.psi_residual)},
         {"energy_drift", number(r.energy_drift)},
         {"ode_residual", number(r.ode_residual)},
         {"seam_jump", number(r.seam_jump)},
         {"bisection_steps", r.bisection_steps},
         {"arc_nodes", r.plus.n},
         {"plus_energy", r.plus.energy},
         {"minus_energy", r.minus.energy},
         {"params", to_json(r.params)}};
  if (!profile_path.empty()) j["profile_path"] = profile_path;
  return j;
}

Json to_json(const HarmonicReport& h) {
  Json j;
  if (h.leading) {
    j["leading"] = Json{{"degree", h.leading->degree},
                        {"cos", h.leading->cos_coeff},
                        {"sin", h.leading->sin_coeff},
                        {"fit_error", h.leading->fit_error}};
  } else {
    j["leading"] = nullptr;
  }
  j["gamma_q_ambiguity"] = h.gamma_q_ambiguity;
  Json fits = Json::array();
  for (double f : h.fit_errors) fits.push_back(number(f));
  j["fit_errors"] = fits;
  return j;
}

Json to_json(const OrderEstimate& e) {
  Json j{{"raw_slope", e.raw_slope}};
  j["snapped"] = e.snapped ? Json(*e.snapped) : Json("inconclusive");
  j["snapped_to_gamma_q"] = e.snapped_to_gamma_q;
  j["window"] = Json::array({e.r_window.first, e.r_window.second});
  j["h1_slope"] = e.h1_slope;
  j["orders_agree"] = e.orders_agree;
  j["nondeg_ratio"] = number(e.nondegeneracy_ratio);
  j["fourier"] = e.fourier ? to_json(*e.fourier) : Json(nullptr);
  return j;
}

Json to_json(const TransitionEstimate& t) {
  Json verdicts = Json::array();
  for (const auto& v : t.verdicts) {
    verdicts.push_back(Json{{"gamma", v.gamma},
                            {"diverging", v.diverging},
                            {"w_min", number(v.w_min)},
                            {"log_slope", number(v.log_slope)}});
  }
  return Json{{"estimate", t.estimate}, {"lower", t.lower}, {"upper", t.upper}, {"verdicts", verdicts}};
}

Json to_json(const ProfileZeros& z) {
  return Json{{"count", z.zeros.size()},
              {"zeros", z.zeros},
              {"slopes", z.slopes},
              {"antipodal", z.antipodal},
              {"degenerate", z.degenerate},
              {"min_abs_slope", z.min_abs_slope}};
}

Json to_json(const FunctionalTrace& t) {
  Json values = Json::array();
  for (double v : t.values) values.push_back(number(v));
  return Json{{"label", t.label}, {"radii", t.radii}, {"values", values}};
}

Json error_json(const Error& e) { return Json{{"error", to_string(e.kind())}, {"message", e.what()}}; }

std::string dump(const Json& json) { return json.dump(2) + "\n"; }

}  // namespace nodallab::report
