#include "nodallab/field.hpp"

#include <algorithm>
#include <complex>
#include <sstream>

#include "nodallab/error.hpp"

namespace nodallab {

namespace {

constexpr double kDomainSlack = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Nodal derivative along one lattice line: central inside, second-order
// one-sided at both ends.
double lattice_derivative(const std::vector<double>& v, std::size_t n, std::size_t i, std::size_t stride,
                          std::size_t base, double h) {
  auto at = [&](std::size_t k) { return v[base + k * stride]; };
  if (i == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  if (i == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
  return (at(i + 1) - at(i - 1)) / (2.0 * h);
}

ValueGrad eval_terms(const std::vector<Term>& terms, Vec2 x) noexcept {
  ValueGrad out{0.0, {0.0, 0.0}};
  const std::complex<double> z(x.x, x.y);
  for (const auto& t : terms) {
    switch (t.kind) {
      case Term::Kind::Constant:
        out.value += t.a;
        break;
      case Term::Kind::Radial:
        out.value += t.a * (x.x * x.x + x.y * x.y);
        out.grad.x += 2.0 * t.a * x.x;
        out.grad.y += 2.0 * t.a * x.y;
        break;
      case Term::Kind::Ramp: {
        const double s = std::max(x.x - t.b, 0.0);
        out.value += t.a * s * s;
        out.grad.x += 2.0 * t.a * s;
        break;
      }
      case Term::Kind::Harmonic: {
        const int d = t.degree;
        const std::complex<double> zd = std::pow(z, d);
        const std::complex<double> dz = static_cast<double>(d) * (d == 1 ? std::complex<double>(1.0) : std::pow(z, d - 1));
        // Re/Im of z^d give r^d cos dθ and r^d sin dθ.
        out.value += t.a * zd.real() + t.b * zd.imag();
        out.grad.x += t.a * dz.real() + t.b * dz.imag();
        out.grad.y += -t.a * dz.imag() + t.b * dz.real();
        break;
      }
    }
  }
  return out;
}

}  // namespace

PlanarField PlanarField::homogeneous(double gamma, AngularProfile profile, ProblemParams params) {
  if (!(gamma > 0.0)) throw Error(ErrorKind::Argument, "homogeneous field: gamma must be > 0");
  return PlanarField(Homogeneous{gamma, std::make_shared<const AngularProfile>(std::move(profile))}, params);
}

PlanarField PlanarField::grid(std::size_t n, std::vector<double> values, ProblemParams params) {
  if (n < 3) throw Error(ErrorKind::Argument, "grid field: need n >= 3");
  if (values.size() != n * n) throw Error(ErrorKind::Data, "grid field: expected n*n samples");
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::Data, "grid field: non-finite sample");
  }
  const double h = 2.0 / static_cast<double>(n - 1);
  std::vector<double> gx(n * n), gy(n * n);
  for (std::size_t iy = 0; iy < n; ++iy) {
    for (std::size_t ix = 0; ix < n; ++ix) {
      gx[iy * n + ix] = lattice_derivative(values, n, ix, 1, iy * n, h);
      gy[iy * n + ix] = lattice_derivative(values, n, iy, n, ix, h);
    }
  }
  return PlanarField(Grid{n, h, std::make_shared<const std::vector<double>>(std::move(values)),
                          std::make_shared<const std::vector<double>>(std::move(gx)),
                          std::make_shared<const std::vector<double>>(std::move(gy))},
                     params);
}

PlanarField PlanarField::closed_form(std::string id, std::vector<Term> terms, ProblemParams params) {
  for (const auto& t : terms) {
    if (t.kind == Term::Kind::Harmonic && t.degree < 1) {
      throw Error(ErrorKind::Argument, "closed form: harmonic degree must be >= 1");
    }
  }
  return PlanarField(ClosedForm{std::move(id), std::move(terms)}, params);
}

PlanarField PlanarField::rescaled(const PlanarField& base, Vec2 center, double radius, double divisor) {
  if (!(radius > 0.0) || !(divisor > 0.0)) {
    throw Error(ErrorKind::Argument, "rescaled field: radius and divisor must be > 0");
  }
  return PlanarField(Rescaled{std::make_shared<const PlanarField>(base), center, radius, divisor}, base.params_);
}

PlanarField::Kind PlanarField::kind() const noexcept {
  return std::visit(overloaded{[](const Homogeneous&) { return Kind::Homogeneous; },
                               [](const Grid&) { return Kind::Grid; },
                               [](const ClosedForm&) { return Kind::ClosedForm; },
                               [](const Rescaled&) { return Kind::Rescaled; }},
                    data_);
}

std::string PlanarField::describe() const {
  std::ostringstream out;
  std::visit(overloaded{[&](const Homogeneous& h) { out << "homogeneous(gamma=" << h.gamma << ", n_theta=" << h.profile->size() << ")"; },
                        [&](const Grid& g) { out << "grid(n=" << g.n << ")"; },
                        [&](const ClosedForm& c) { out << "closed-form(" << c.id << ")"; },
                        [&](const Rescaled& r) {
                          out << "rescaled(" << r.base->describe() << ", center=(" << r.center.x << "," << r.center.y
                              << "), r=" << r.radius << ")";
                        }},
             data_);
  return out.str();
}

bool PlanarField::contains(Vec2 x) const noexcept {
  return std::visit(overloaded{[&](const Grid&) {
                                 return std::abs(x.x) <= 1.0 + kDomainSlack && std::abs(x.y) <= 1.0 + kDomainSlack;
                               },
                               [&](const Rescaled& r) { return r.base->contains(r.center + r.radius * x); },
                               [&](const auto&) { return norm(x) <= 1.0 + kDomainSlack; }},
                    data_);
}

bool PlanarField::contains_ball(Vec2 center, double radius) const noexcept {
  return std::visit(overloaded{[&](const Grid&) {
                                 return std::abs(center.x) + radius <= 1.0 + kDomainSlack &&
                                        std::abs(center.y) + radius <= 1.0 + kDomainSlack;
                               },
                               [&](const Rescaled& r) {
                                 return r.base->contains_ball(r.center + r.radius * center, r.radius * radius);
                               },
                               [&](const auto&) { return norm(center) + radius <= 1.0 + kDomainSlack; }},
                    data_);
}

ValueGrad PlanarField::eval_with_grad_unchecked(Vec2 x) const noexcept {
  return std::visit(
      overloaded{
          [&](const Homogeneous& h) -> ValueGrad {
            const double r = norm(x);
            if (r == 0.0) return {0.0, {0.0, 0.0}};
            const double theta = std::atan2(x.y, x.x);
            const double phi = h.profile->value_at(theta);
            const double dphi = h.profile->derivative_at(theta);
            const double rg1 = std::pow(r, h.gamma - 1.0);
            const double c = x.x / r, s = x.y / r;
            // ∇u = r^{γ-1} (γ φ e_r + φ' e_θ)
            const double radial = h.gamma * phi, angular = dphi;
            return {rg1 * r * phi, {rg1 * (radial * c - angular * s), rg1 * (radial * s + angular * c)}};
          },
          [&](const Grid& g) -> ValueGrad {
            const double fx = std::clamp((x.x + 1.0) / g.h, 0.0, static_cast<double>(g.n - 1));
            const double fy = std::clamp((x.y + 1.0) / g.h, 0.0, static_cast<double>(g.n - 1));
            auto ix = std::min(static_cast<std::size_t>(fx), g.n - 2);
            auto iy = std::min(static_cast<std::size_t>(fy), g.n - 2);
            const double sx = fx - static_cast<double>(ix), sy = fy - static_cast<double>(iy);
            auto bilinear = [&](const std::vector<double>& v) {
              const std::size_t k = iy * g.n + ix;
              return (1 - sx) * (1 - sy) * v[k] + sx * (1 - sy) * v[k + 1] + (1 - sx) * sy * v[k + g.n] +
                     sx * sy * v[k + g.n + 1];
            };
            return {bilinear(*g.values), {bilinear(*g.gx), bilinear(*g.gy)}};
          },
          [&](const ClosedForm& c) -> ValueGrad { return eval_terms(c.terms, x); },
          [&](const Rescaled& r) -> ValueGrad {
            const auto inner = r.base->eval_with_grad_unchecked(r.center + r.radius * x);
            const double k = r.radius / r.divisor;
            return {inner.value / r.divisor, {k * inner.grad.x, k * inner.grad.y}};
          }},
      data_);
}

double PlanarField::eval_unchecked(Vec2 x) const noexcept {
  if (const auto* h = std::get_if<Homogeneous>(&data_)) {
    const double r = norm(x);
    if (r == 0.0) return 0.0;
    return std::pow(r, h->gamma) * h->profile->value_at(std::atan2(x.y, x.x));
  }
  return eval_with_grad_unchecked(x).value;
}

ValueGrad PlanarField::eval_with_grad(Vec2 x) const {
  if (!contains(x)) {
    std::ostringstream msg;
    msg << "point (" << x.x << ", " << x.y << ") outside domain of " << describe();
    throw Error(ErrorKind::Domain, msg.str());
  }
  return eval_with_grad_unchecked(x);
}

double PlanarField::eval(Vec2 x) const {
  if (!contains(x)) {
    std::ostringstream msg;
    msg << "point (" << x.x << ", " << x.y << ") outside domain of " << describe();
    throw Error(ErrorKind::Domain, msg.str());
  }
  return eval_unchecked(x);
}

Vec2 PlanarField::grad(Vec2 x) const { return eval_with_grad(x).grad; }

double PlanarField::homogeneity() const {
  if (const auto* h = std::get_if<Homogeneous>(&data_)) return h->gamma;
  throw Error(ErrorKind::Argument, "field is not homogeneous");
}

const AngularProfile& PlanarField::profile() const {
  if (const auto* h = std::get_if<Homogeneous>(&data_)) return *h->profile;
  throw Error(ErrorKind::Argument, "field is not homogeneous");
}

std::size_t PlanarField::grid_size() const {
  if (const auto* g = std::get_if<Grid>(&data_)) return g->n;
  throw Error(ErrorKind::Argument, "field is not a grid");
}

double PlanarField::grid_spacing() const {
  if (const auto* g = std::get_if<Grid>(&data_)) return g->h;
  throw Error(ErrorKind::Argument, "field is not a grid");
}

const std::vector<double>& PlanarField::grid_values() const {
  if (const auto* g = std::get_if<Grid>(&data_)) return *g->values;
  throw Error(ErrorKind::Argument, "field is not a grid");
}

const std::vector<Term>& PlanarField::terms() const {
  if (const auto* c = std::get_if<ClosedForm>(&data_)) return c->terms;
  throw Error(ErrorKind::Argument, "field is not closed-form");
}

const std::string& PlanarField::closed_form_id() const {
  if (const auto* c = std::get_if<ClosedForm>(&data_)) return c->id;
  throw Error(ErrorKind::Argument, "field is not closed-form");
}

namespace fields {

PlanarField linear(const ProblemParams& params) {
  return PlanarField::closed_form("linear", {Term::harmonic(1, 1.0)}, params);
}

PlanarField saddle(const ProblemParams& params) {
  return PlanarField::closed_form("saddle", {Term::harmonic(2, 1.0)}, params);
}

PlanarField monomial(int degree, const ProblemParams& params) {
  return PlanarField::closed_form("monomial:" + std::to_string(degree), {Term::harmonic(degree, 1.0)}, params);
}

PlanarField circle(double radius, const ProblemParams& params) {
  std::ostringstream id;
  id.precision(17);
  id << "circle:" << radius;
  return PlanarField::closed_form(id.str(), {Term::radial(1.0), Term::constant(-radius * radius)}, params);
}

PlanarField constant(double c, const ProblemParams& params) {
  std::ostringstream id;
  id.precision(17);
  id << "constant:" << c;
  return PlanarField::closed_form(id.str(), {Term::constant(c)}, params);
}

PlanarField from_name(const std::string& name, const ProblemParams& params) {
  const auto colon = name.find(':');
  const std::string head = name.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : name.substr(colon + 1);
  auto number = [&]() {
    try {
      std::size_t used = 0;
      const double v = std::stod(arg, &used);
      if (used != arg.size()) throw std::invalid_argument(arg);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorKind::Argument, "test field '" + name + "': bad numeric argument");
    }
  };
  if (head == "linear" && arg.empty()) return linear(params);
  if (head == "saddle" && arg.empty()) return saddle(params);
  if (head == "monomial") {
    const double d = number();
    if (d < 1 || d != std::floor(d)) throw Error(ErrorKind::Argument, "monomial degree must be a positive integer");
    return monomial(static_cast<int>(d), params);
  }
  if (head == "circle") return circle(number(), params);
  if (head == "constant") return constant(number(), params);
  throw Error(ErrorKind::Argument, "unknown test field '" + name + "'");
}

}  // namespace fields

}  // namespace nodallab
