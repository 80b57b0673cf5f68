#pragma once

#include <vector>

#include "nodallab/field.hpp"
#include "nodallab/params.hpp"
#include "nodallab/profile.hpp"
#include "nodallab/trace.hpp"

namespace nodallab {

enum class ArcSide { Plus, Minus };

/// Discrete signed minimizer of
///   J(φ) = ∫ ½ φ'² - ½ γ_q² φ² - (mu λ±/q) |φ|^q
/// over H¹₀ of the arc: (0, t) for the plus side, (t, T) for the minus side.
struct ArcMinimizer {
  ArcSide side = ArcSide::Plus;
  double a = 0.0;                // arc start
  double b = 0.0;                // arc end
  std::size_t n = 0;             // interior nodes
  std::vector<double> values;    // n + 2 samples including the zero endpoints
  std::vector<double> slopes;    // φ' at the same nodes, recovered from the discrete equation
  double energy = 0.0;           // discrete J
  double endpoint_slope = 0.0;   // φ' at the matching end (b for plus, a for minus)
  double far_slope = 0.0;        // φ' at the other end
  double residual = 0.0;         // max |Euler-Lagrange residual| relative to the equation scale
  int newton_iterations = 0;

  double spacing() const noexcept { return (b - a) / static_cast<double>(n + 1); }
  double node(std::size_t i) const noexcept { return a + spacing() * static_cast<double>(i); }
  /// Cubic Hermite interpolation of (values, slopes) at θ ∈ [a, b].
  double value_at(double theta) const noexcept;
  double slope_at(double theta) const noexcept;
  /// ∫ φ'² by the cell-wise difference quotients.
  double dirichlet_energy() const noexcept;
};

struct ArcOptions {
  double residual_tolerance = 1e-10;  // relative to λ max|φ|^{q-1} + γ² max|φ|
  int max_iterations = 100;
};

/// Piecewise linear elements with exactly integrated energy terms, damped
/// Newton with sign projection. Requires 0 < t < T and T γ_q < π, the
/// coercivity condition behind T = 2π/k with k > k_bar.
ArcMinimizer minimize_arc(const ProblemParams& params, double t, double T, ArcSide side, std::size_t n,
                          const ArcOptions& opts = {});

/// Ψ(t) = φ₊'(t⁻, t) - φ₋'(t⁺, t) with T = 2π/k.
double psi(const ProblemParams& params, int k, double t, std::size_t n, const ArcOptions& opts = {});

struct PsiSample {
  double t;
  double value;
};

struct PsiScan {
  std::vector<PsiSample> samples;
  std::vector<std::pair<double, double>> sign_changes;  // brackets (t_i, t_{i+1})
};

/// Ψ on `count` evenly spaced points of [εT, (1-ε)T].
PsiScan scan_psi(const ProblemParams& params, int k, std::size_t n, std::size_t count,
                 double bracket_fraction = 1e-3, const ArcOptions& opts = {});

struct ConstructOptions {
  std::size_t arc_nodes = 2048;
  std::size_t profile_samples = 8192;  // rounded up to a multiple of k
  double bracket_fraction = 1e-3;
  double psi_tolerance = 1e-8;
  double bracket_tolerance = 1e-10;    // relative to T
  ArcOptions arc;
};

struct MatchingResult {
  ProblemParams params;
  int k = 0;
  double T = 0.0;
  double t_bar = 0.0;
  AngularProfile profile;
  ArcMinimizer plus;
  ArcMinimizer minus;
  double psi_residual = 0.0;
  double energy_drift = 0.0;
  double ode_residual = 0.0;
  double seam_jump = 0.0;        // |φ'(0⁺) - φ'(T⁻)| relative to the slope scale
  int bisection_steps = 0;

  /// The homogeneous lift r^{γ_q} φ(θ).
  PlanarField field() const;
};

/// Builds the 2π-periodic profile with 2k zeros for k > k_bar by bisecting Ψ,
/// gluing φ₊ and φ₋ at the root, and tiling k copies of the glued cell.
MatchingResult construct_uk(const ProblemParams& params, int k, const ConstructOptions& opts = {});

/// Per-node φ'²/2 + γ_q² φ²/2 + F(φ)/q along the profile (θ in `radii`).
FunctionalTrace energy_function(const ProblemParams& params, const AngularProfile& profile);

/// (max - min) / mean of the energy function.
double energy_drift(const ProblemParams& params, const AngularProfile& profile);

struct HamiltonianTrajectory {
  std::vector<double> times;
  std::vector<double> w;
  std::vector<double> w_prime;
  std::vector<double> hamiltonian;
  double drift = 0.0;          // (max - min) / |ℋ(0)|, absolute when ℋ(0) = 0
  std::size_t crossings = 0;   // sign changes of w that were located and stepped onto
};

/// RK4 for -w'' = mu (λ₊ (w⁺)^{q-1} - λ₋ (w⁻)^{q-1}), stepping exactly onto
/// every zero of w so each RK4 step sees one smooth branch of the right-hand side.
HamiltonianTrajectory hamiltonian_cauchy(const ProblemParams& params, double w0, double w0_prime, double step,
                                         std::size_t steps);

/// ℋ(w, w') = w'²/2 + F(w)/q.
double hamiltonian(const ProblemParams& params, double w, double w_prime) noexcept;

}  // namespace nodallab
