#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nodallab/field.hpp"
#include "nodallab/params.hpp"
#include "nodallab/trace.hpp"

namespace nodallab {

/// Every sampled-field computation is planar.
inline constexpr int kDimension = 2;

struct QuadratureOptions {
  std::size_t theta_nodes = 1024;   // trapezoid nodes on each circle
  std::size_t radial_panels = 512;  // composite Simpson panels on [0, r]
  double eps_h_factor = 1e-14;      // degenerate-sphere floor, relative
  unsigned jobs = 1;                // ladder radii evaluated concurrently
};

/// The sphere and ball integrals at one (x0, r). All functionals below are
/// algebraic in these numbers, so a ladder only pays for quadrature once.
struct Moments {
  Vec2 center;
  double r = 0.0;
  double sphere_u2 = 0.0;     // ∫_S u²
  double sphere_u_un = 0.0;   // ∫_S u ∂_ν u
  double sphere_un2 = 0.0;    // ∫_S (∂_ν u)²
  double sphere_F = 0.0;      // ∫_S F(u)
  double sphere_max_u = 0.0;  // max |u| over the circle nodes
  bool has_ball = false;
  double ball_grad2 = 0.0;    // ∫_B |∇u|²
  double ball_F = 0.0;        // ∫_B F(u)
  double q = 1.0;             // exponent the F integrals were taken with

  double eps_h(double factor) const noexcept;
};

Moments compute_moments(const PlanarField& field, Vec2 x0, double r, const QuadratureOptions& opts = {},
                         bool with_ball = true);
std::vector<Moments> compute_moments(const PlanarField& field, Vec2 x0, const std::vector<double>& radii,
                                     const QuadratureOptions& opts = {}, bool with_ball = true);

// Algebra on precomputed moments (N = 2).
double H_of(const Moments& m) noexcept;
double Dt_of(const Moments& m, double t) noexcept;
/// Throws a degenerate-sphere error when H is below the floor.
double Nt_of(const Moments& m, double t, double eps_factor = 1e-14);
double W_of(const Moments& m, double gamma, double t) noexcept;
double Phi_of(const Moments& m, double gamma) noexcept;
double h1_norm_of(const Moments& m) noexcept;
/// Right-hand side of the W'_{γ,t} identity.
double W_derivative_rhs(const Moments& m, double gamma, double t) noexcept;
/// Right-hand side of H' = (N-1)/r H + 2 D_q.
double H_derivative_rhs(const Moments& m) noexcept;

/// F(s) = mu (λ₊ (s⁺)^q + λ₋ (s⁻)^q).
double eval_F(const ProblemParams& params, double s) noexcept;

double eval_H(const PlanarField& field, Vec2 x0, double r, const QuadratureOptions& opts = {});
double eval_Dt(const PlanarField& field, Vec2 x0, double r, double t, const QuadratureOptions& opts = {});
double eval_Nt(const PlanarField& field, Vec2 x0, double r, double t, const QuadratureOptions& opts = {});
double eval_W(const PlanarField& field, Vec2 x0, double r, double gamma, double t, const QuadratureOptions& opts = {});
double eval_Phi(const PlanarField& field, Vec2 x0, double r, double gamma, const QuadratureOptions& opts = {});
double h1_norm(const PlanarField& field, Vec2 x0, double r, const QuadratureOptions& opts = {});

enum class FunctionalKind { H, Dt, Nt, W, Phi, H1 };

struct FunctionalSpec {
  FunctionalKind kind = FunctionalKind::W;
  double gamma = 0.0;
  double t = 2.0;

  std::string label() const;
};

FunctionalTrace sample_trace(const PlanarField& field, Vec2 x0, const std::vector<double>& radii,
                             const FunctionalSpec& spec, const QuadratureOptions& opts = {});
FunctionalTrace sample_trace(const std::vector<Moments>& moments, const FunctionalSpec& spec);

struct IdentityReport {
  double gamma = 0.0;
  double t = 0.0;
  std::vector<double> radii;
  std::vector<double> h_residuals;    // |H'_fd - rhs| / max(|H'_fd|, |rhs|)
  std::vector<double> w_residuals;    // |W'_fd - rhs| / (|W'_fd| + |rhs| + |W|/r + γH/r^{N+2γ})
  std::vector<double> wn_residuals;   // |W - H r^{-(1+2γ)} (N_t - γ)| relative
  double max_h_residual = 0.0;
  double max_w_residual = 0.0;
  double max_wn_residual = 0.0;
};

/// Centered finite differences of H and W_{γ,t} against their closed-form
/// derivatives, plus the W/N consistency relation, along a ladder.
/// `relative_step` is the FD half-width as a fraction of r.
IdentityReport check_derivative_identities(const PlanarField& field, Vec2 x0, const std::vector<double>& radii,
                                           double gamma, double t, const QuadratureOptions& opts = {},
                                           double relative_step = 1e-4);

struct MonotonicityVerdict {
  bool monotone = true;
  std::optional<double> violation_radius;
  double worst_drop = 0.0;  // largest W(r_j) - W(r_{j+1}) seen, in units of the tolerance scale
  FunctionalTrace trace;
};

/// Scans W_{γ,2} along the ladder; requires γ >= γ_q.
MonotonicityVerdict monotonicity_scan(const PlanarField& field, Vec2 x0, double gamma,
                                      const std::vector<double>& radii, const QuadratureOptions& opts = {});
MonotonicityVerdict monotonicity_scan(const std::vector<Moments>& moments, const ProblemParams& params, double gamma);

struct TransitionOptions {
  double zero_tolerance = 1e-9;  // |W| below this fraction of H r^{-(1+2γ)} counts as bounded
  double slope_tolerance = 0.02; // |W| must grow at least like r^{-slope} to count as diverging
  double eps_u = 1e-8;           // |u(x0)| above this (relative to sphere scale) fails the precondition
};

struct GammaVerdict {
  double gamma;
  bool diverging;
  double w_min;       // W at the smallest radius
  double log_slope;   // slope of log|W| against log r on the smallest decade
};

struct TransitionEstimate {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::vector<GammaVerdict> verdicts;
};

/// Brackets inf{γ : W_{γ,2}(x0, r→0⁺) = -∞} on a γ grid.
TransitionEstimate transition_exponent(const PlanarField& field, Vec2 x0, const std::vector<double>& gammas,
                                       const std::vector<double>& radii, const QuadratureOptions& opts = {},
                                       const TransitionOptions& topts = {});
TransitionEstimate transition_exponent(const std::vector<Moments>& moments, const std::vector<double>& gammas,
                                       const TransitionOptions& topts = {});

/// Evenly spaced γ grid [lo, hi] with the given step.
std::vector<double> gamma_grid(double lo, double hi, double step);

}  // namespace nodallab
