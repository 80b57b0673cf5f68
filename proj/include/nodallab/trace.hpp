#pragma once

#include <string>
#include <vector>

namespace nodallab {

/// A functional sampled on a ladder of radii (or of angles, for the energy
/// function along a profile, where `radii` holds θ).
struct FunctionalTrace {
  std::vector<double> radii;
  std::vector<double> values;
  std::string label;

  std::size_t size() const noexcept { return radii.size(); }

  /// (max - min) / |mean| of the values; 0 for an identically zero trace.
  double relative_spread() const noexcept;
};

/// Strictly increasing radii in (0, limit).
bool is_valid_ladder(const std::vector<double>& radii, double limit) noexcept;

/// n radii geometrically spaced from r_min to r_max inclusive.
std::vector<double> geometric_ladder(double r_min, double r_max, std::size_t n);

/// n radii evenly spaced from r_min to r_max inclusive.
std::vector<double> linear_ladder(double r_min, double r_max, std::size_t n);

}  // namespace nodallab
