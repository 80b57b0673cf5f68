#include "nodallab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nodallab/error.hpp"

namespace nodallab {

AngularProfile::AngularProfile(std::vector<double> values, std::vector<double> derivative,
                               std::optional<ProblemParams> params)
    : values_(std::move(values)), derivative_(std::move(derivative)), params_(std::move(params)) {
  if (values_.size() != derivative_.size()) {
    throw Error(ErrorKind::Data, "profile: values and derivative lengths differ");
  }
  if (values_.size() < kMinSamples) {
    throw Error(ErrorKind::Data, "profile: need at least 16 samples");
  }
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!std::isfinite(values_[j]) || !std::isfinite(derivative_[j])) {
      throw Error(ErrorKind::Data, "profile: non-finite sample at index " + std::to_string(j));
    }
  }
}

double AngularProfile::spacing() const noexcept {
  return 2.0 * std::numbers::pi / static_cast<double>(values_.size());
}

double AngularProfile::node(std::size_t j) const noexcept { return spacing() * static_cast<double>(j); }

namespace {

struct Cell {
  std::size_t j0, j1;
  double s;  // local coordinate in [0,1)
};

Cell locate(double theta, std::size_t n, double h) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double t = std::fmod(theta, two_pi);
  if (t < 0.0) t += two_pi;
  double x = t / h;
  auto j = static_cast<std::size_t>(std::floor(x));
  if (j >= n) j = n - 1;
  double s = x - static_cast<double>(j);
  s = std::clamp(s, 0.0, 1.0);
  return {j, (j + 1) % n, s};
}

}  // namespace

double AngularProfile::value_at(double theta) const noexcept {
  const double h = spacing();
  const auto c = locate(theta, values_.size(), h);
  const double s = c.s, s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * values_[c.j0] + h10 * h * derivative_[c.j0] + h01 * values_[c.j1] + h11 * h * derivative_[c.j1];
}

double AngularProfile::derivative_at(double theta) const noexcept {
  const double h = spacing();
  const auto c = locate(theta, values_.size(), h);
  const double s = c.s, s2 = s * s;
  const double d00 = 6 * s2 - 6 * s, d10 = 3 * s2 - 4 * s + 1;
  const double d01 = -6 * s2 + 6 * s, d11 = 3 * s2 - 2 * s;
  return (d00 * values_[c.j0] + d01 * values_[c.j1]) / h + d10 * derivative_[c.j0] + d11 * derivative_[c.j1];
}

double AngularProfile::scale() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double AngularProfile::seam_gap() const noexcept {
  const std::size_t n = values_.size();
  // Cubic through the last four nodes, evaluated one step past the end.
  const double extrapolated = 4.0 * values_[n - 1] - 6.0 * values_[n - 2] + 4.0 * values_[n - 3] - values_[n - 4];
  return std::abs(values_[0] - extrapolated);
}

}  // namespace nodallab
