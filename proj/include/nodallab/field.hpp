#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "nodallab/params.hpp"
#include "nodallab/profile.hpp"

namespace nodallab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// One summand of a closed-form test field.
struct Term {
  enum class Kind { Harmonic, Constant, Radial, Ramp };

  Kind kind = Kind::Constant;
  int degree = 0;
  double a = 0.0;
  double b = 0.0;

  /// r^d (a cos dθ + b sin dθ), d >= 1.
  static Term harmonic(int degree, double a, double b = 0.0) { return {Kind::Harmonic, degree, a, b}; }
  static Term constant(double c) { return {Kind::Constant, 0, c, 0.0}; }
  /// a |x|².
  static Term radial(double a) { return {Kind::Radial, 0, a, 0.0}; }
  /// a · max(x₁ - shift, 0)²; vanishes identically on a half-plane.
  static Term ramp(double a, double shift) { return {Kind::Ramp, 0, a, shift}; }
};

struct ValueGrad {
  double value;
  Vec2 grad;
};

/// A scalar field on the closed unit disk (or on [-1,1]² for sampled grids).
///
/// Fields are immutable after construction and cheap to copy; the heavy
/// payloads (profile, grid samples) are shared.
class PlanarField {
 public:
  enum class Kind { Homogeneous, Grid, ClosedForm, Rescaled };

  /// |x|^γ φ(atan2(x₂, x₁)).
  static PlanarField homogeneous(double gamma, AngularProfile profile, ProblemParams params);

  /// Samples on the (n x n) lattice x = -1 + i h, h = 2/(n-1); row-major with
  /// the x₁ index fastest.
  static PlanarField grid(std::size_t n, std::vector<double> values, ProblemParams params);

  template <class F>
  static PlanarField sample_grid(std::size_t n, F&& f, ProblemParams params);

  static PlanarField closed_form(std::string id, std::vector<Term> terms, ProblemParams params);

  /// x ↦ base(center + radius x) / divisor.
  static PlanarField rescaled(const PlanarField& base, Vec2 center, double radius, double divisor);

  Kind kind() const noexcept;
  const ProblemParams& params() const noexcept { return params_; }
  std::string describe() const;

  bool contains(Vec2 x) const noexcept;

  /// Throw a domain error when x is outside the field domain.
  double eval(Vec2 x) const;
  Vec2 grad(Vec2 x) const;
  ValueGrad eval_with_grad(Vec2 x) const;

  /// As above without the domain check; callers have validated the region.
  ValueGrad eval_with_grad_unchecked(Vec2 x) const noexcept;
  double eval_unchecked(Vec2 x) const noexcept;

  /// True when every point of the closed ball lies in the domain.
  bool contains_ball(Vec2 center, double radius) const noexcept;

  // Kind-specific accessors; each throws an argument error for other kinds.
  double homogeneity() const;
  const AngularProfile& profile() const;
  std::size_t grid_size() const;
  double grid_spacing() const;
  const std::vector<double>& grid_values() const;
  const std::vector<Term>& terms() const;
  const std::string& closed_form_id() const;

 private:
  struct Homogeneous {
    double gamma;
    std::shared_ptr<const AngularProfile> profile;
  };
  struct Grid {
    std::size_t n;
    double h;
    std::shared_ptr<const std::vector<double>> values;
    std::shared_ptr<const std::vector<double>> gx;
    std::shared_ptr<const std::vector<double>> gy;
  };
  struct ClosedForm {
    std::string id;
    std::vector<Term> terms;
  };
  struct Rescaled {
    std::shared_ptr<const PlanarField> base;
    Vec2 center;
    double radius;
    double divisor;
  };
  using Data = std::variant<Homogeneous, Grid, ClosedForm, Rescaled>;

  PlanarField(Data data, ProblemParams params) : data_(std::move(data)), params_(params) {}

  Data data_;
  ProblemParams params_;
};

template <class F>
PlanarField PlanarField::sample_grid(std::size_t n, F&& f, ProblemParams params) {
  std::vector<double> values(n * n);
  const double h = 2.0 / static_cast<double>(n - 1);
  for (std::size_t iy = 0; iy < n; ++iy) {
    for (std::size_t ix = 0; ix < n; ++ix) {
      values[iy * n + ix] = f(Vec2{-1.0 + h * static_cast<double>(ix), -1.0 + h * static_cast<double>(iy)});
    }
  }
  return grid(n, std::move(values), params);
}

namespace fields {

/// Closed-form catalogue used by tests, the CLI and the Python module.
PlanarField linear(const ProblemParams& params);                 // x₁
PlanarField saddle(const ProblemParams& params);                 // x₁² - x₂²
PlanarField monomial(int degree, const ProblemParams& params);   // r^d cos dθ
PlanarField circle(double radius, const ProblemParams& params);  // |x|² - radius²
PlanarField constant(double c, const ProblemParams& params);

/// Parses "linear", "saddle", "monomial:<d>", "circle:<r>", "constant:<c>".
PlanarField from_name(const std::string& name, const ProblemParams& params);

}  // namespace fields

}  // namespace nodallab
