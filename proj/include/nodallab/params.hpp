#pragma once

#include <optional>
#include <vector>

namespace nodallab {

/// Coefficients of  -Δu = mu (λ₊ (u⁺)^{q-1} - λ₋ (u⁻)^{q-1}).
///
/// The constructor enforces 1 <= q < 2, λ₊ > 0, λ₋ >= 0 and mu >= 0. Harmonic
/// test fields are described with mu = 0, which switches every
/// nonlinear term off while keeping q (and hence the critical exponent).
class ProblemParams {
 public:
  ProblemParams(double q, double lambda_plus, double lambda_minus, double mu = 1.0);

  double q() const noexcept { return q_; }
  double lambda_plus() const noexcept { return lambda_plus_; }
  double lambda_minus() const noexcept { return lambda_minus_; }
  double mu() const noexcept { return mu_; }

  /// Copy with a different equation scale.
  ProblemParams with_mu(double mu) const { return {q_, lambda_plus_, lambda_minus_, mu}; }
  /// Copy with the two phases exchanged.
  ProblemParams swapped() const { return {q_, lambda_minus_, lambda_plus_, mu_}; }

  /// s ↦ mu (λ₊ (s⁺)^{q-1} - λ₋ (s⁻)^{q-1}); for q = 1 the power is the
  /// indicator of the open phase, and the value at s = 0 is 0.
  double nonlinearity(double s) const noexcept;

  /// F(s) = mu (λ₊ (s⁺)^q + λ₋ (s⁻)^q).
  double potential(double s) const noexcept;

 private:
  double q_;
  double lambda_plus_;
  double lambda_minus_;
  double mu_;
};

struct DerivedExponents {
  double gamma_q;    // 2/(2-q)
  int beta_q;        // largest integer strictly below gamma_q
  double lambda_nq;  // gamma_q (N - 2 + gamma_q)
  int k_bar;         // smallest integer >= 2 gamma_q
};

double gamma_q(const ProblemParams& params) noexcept;
int beta_q(const ProblemParams& params) noexcept;
int k_bar(const ProblemParams& params) noexcept;
double lambda_nq(const ProblemParams& params, int dimension = 2) noexcept;
DerivedExponents derived_exponents(const ProblemParams& params, int dimension = 2) noexcept;

/// True when x is an integer up to a few ulps.
bool is_integer_value(double x) noexcept;

/// β₁ = q + 1, β_k = (q-1) β_{k-1} + 2 - δ_k.
///
/// With explicit `deltas` (one per term, δ_k ∈ [0, 2^{-k})) the recurrence is
/// evaluated as given; δ₁ is validated but does not enter β₁. Without deltas
/// the automatic rule is used: δ_k = 0 when the undamped value is not an
/// integer, otherwise δ_k = min(2^{-k-1}, (2 - (2-q) β_{k-1}) / 2). The
/// automatic rule is one admissible choice among many and needs 1 < q < 2.
std::vector<double> beta_k_sequence(const ProblemParams& params, int count,
                                    const std::optional<std::vector<double>>& deltas = std::nullopt);

/// gamma_q - beta_k for the same sequence, computed without cancellation.
/// Once beta_k rounds to gamma_q in double precision the gaps still resolve
/// the ordering of the terms.
std::vector<double> beta_k_gaps(const ProblemParams& params, int count,
                                const std::optional<std::vector<double>>& deltas = std::nullopt);

/// σ₀ = 1, σ_k = (2 + q σ_{k-1})/4 + σ_{k-1}/2; returns σ₀..σ_count.
std::vector<double> sigma_k_sequence(const ProblemParams& params, int count);

}  // namespace nodallab
