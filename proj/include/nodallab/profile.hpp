#pragma once

#include <optional>
#include <vector>

#include "nodallab/params.hpp"

namespace nodallab {

/// A 2π-periodic angular profile φ sampled at θ_j = 2πj/n together with φ'.
///
/// Off-grid evaluation is periodic cubic Hermite interpolation using the
/// stored derivative samples, so the interpolant is C¹ on the whole circle.
class AngularProfile {
 public:
  static constexpr std::size_t kMinSamples = 16;

  AngularProfile(std::vector<double> values, std::vector<double> derivative,
                 std::optional<ProblemParams> params = std::nullopt);

  /// Samples φ and φ' from callables at the uniform nodes.
  template <class Phi, class DPhi>
  static AngularProfile sample(std::size_t n, Phi&& phi, DPhi&& dphi,
                               std::optional<ProblemParams> params = std::nullopt);

  std::size_t size() const noexcept { return values_.size(); }
  double spacing() const noexcept;
  double node(std::size_t j) const noexcept;

  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& derivative() const noexcept { return derivative_; }
  const std::optional<ProblemParams>& params() const noexcept { return params_; }

  double value_at(double theta) const noexcept;
  double derivative_at(double theta) const noexcept;

  /// max_j |φ_j|.
  double scale() const noexcept;

  /// Mismatch between φ(0) and the cubic extrapolation of the last four
  /// samples to θ = 2π; small for a profile that is continuous across the seam.
  double seam_gap() const noexcept;

 private:
  std::vector<double> values_;
  std::vector<double> derivative_;
  std::optional<ProblemParams> params_;
};

template <class Phi, class DPhi>
AngularProfile AngularProfile::sample(std::size_t n, Phi&& phi, DPhi&& dphi,
                                      std::optional<ProblemParams> params) {
  std::vector<double> v(n), d(n);
  const double h = 2.0 * 3.14159265358979323846 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double theta = h * static_cast<double>(j);
    v[j] = phi(theta);
    d[j] = dphi(theta);
  }
  return AngularProfile(std::move(v), std::move(d), std::move(params));
}

}  // namespace nodallab
