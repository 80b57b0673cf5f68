#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nodallab/field.hpp"
#include "nodallab/functionals.hpp"

namespace nodallab {

struct LeadingHarmonic {
  int degree = 0;
  double cos_coeff = 0.0;  // c in r^d (c cos dθ + s sin dθ)
  double sin_coeff = 0.0;
  double fit_error = 0.0;  // (max - min)/mean of |coefficient| / r^d over the ladder
};

struct HarmonicReport {
  std::optional<LeadingHarmonic> leading;
  // γ_q is an integer within the searched degrees, so a degree-γ_q harmonic
  // leading term cannot be told apart from a genuine γ_q-homogeneous blow-up.
  bool gamma_q_ambiguity = false;
  std::vector<double> fit_errors;  // per degree 1..max_degree; +inf below the noise floor
};

struct OrderEstimate {
  double raw_slope = 0.0;          // from ½ log(H / r^{N-1}) against log r
  std::optional<double> snapped;   // nullopt means inconclusive
  bool snapped_to_gamma_q = false;
  std::pair<double, double> r_window{0.0, 0.0};
  double h1_slope = 0.0;           // from log ‖u‖_{x0,r} against log r
  bool orders_agree = false;       // |raw_slope - h1_slope| <= 0.05
  double nondegeneracy_ratio = 0.0;       // min over the ladder of ‖u‖² / r^{2 order}
  std::vector<double> nondegeneracy;      // the same ratio per radius
  std::vector<double> radii;              // ladder actually used
  std::optional<HarmonicReport> fourier;
};

struct OrderOptions {
  double snap_tolerance = 0.15;
  double agreement_tolerance = 0.05;
  double eps_u = 1e-8;       // |u(x0)| above this fraction of the sphere scale fails the precondition
  bool widen = true;         // on an inconclusive snap, double the decade count once
  double min_radius = 0.0;   // widening never goes below this radius
  int max_degree = 0;        // > 0 also runs leading_harmonic with this degree bound
  QuadratureOptions quadrature;
};

/// r_max, r_max/2, ... (count radii), returned in increasing order.
std::vector<double> dyadic_ladder(double r_max, std::size_t count);

/// Admissible vanishing orders {1, ..., β_q, γ_q}.
std::vector<double> admissible_orders(const ProblemParams& params);

OrderEstimate estimate_order(const PlanarField& field, Vec2 x0, const std::vector<double>& radii,
                             const OrderOptions& opts = {});

/// v(x) = u(x0 + r x) / ‖u‖_{x0,r}.
PlanarField blow_up(const PlanarField& field, Vec2 x0, double r, const QuadratureOptions& opts = {});

HarmonicReport leading_harmonic(const PlanarField& field, Vec2 x0, const std::vector<double>& radii, int max_degree,
                                const QuadratureOptions& opts = {});

}  // namespace nodallab
