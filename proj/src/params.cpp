#include "nodallab/params.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nodallab/error.hpp"

namespace nodallab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Argument: return "argument";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::DegenerateSphere: return "degenerate-sphere";
    case ErrorKind::ZeroField: return "zero-field";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Solver: return "solver";
    case ErrorKind::Construction: return "construction";
    case ErrorKind::Inconclusive: return "inconclusive";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Version: return "version";
    case ErrorKind::Data: return "data";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

ProblemParams::ProblemParams(double q, double lambda_plus, double lambda_minus, double mu)
    : q_(q), lambda_plus_(lambda_plus), lambda_minus_(lambda_minus), mu_(mu) {
  if (!(q >= 1.0 && q < 2.0)) {
    throw Error(ErrorKind::Argument, "q must lie in [1,2), got " + std::to_string(q));
  }
  if (!(lambda_plus > 0.0)) throw Error(ErrorKind::Argument, "lambda_plus must be > 0");
  if (!(lambda_minus >= 0.0)) throw Error(ErrorKind::Argument, "lambda_minus must be >= 0");
  if (!(mu >= 0.0)) throw Error(ErrorKind::Argument, "mu must be >= 0");
}

double ProblemParams::nonlinearity(double s) const noexcept {
  if (s > 0.0) return mu_ * lambda_plus_ * (q_ == 1.0 ? 1.0 : std::pow(s, q_ - 1.0));
  if (s < 0.0) return -mu_ * lambda_minus_ * (q_ == 1.0 ? 1.0 : std::pow(-s, q_ - 1.0));
  return 0.0;
}

double ProblemParams::potential(double s) const noexcept {
  if (s > 0.0) return mu_ * lambda_plus_ * std::pow(s, q_);
  if (s < 0.0) return mu_ * lambda_minus_ * std::pow(-s, q_);
  return 0.0;
}

double gamma_q(const ProblemParams& params) noexcept { return 2.0 / (2.0 - params.q()); }

bool is_integer_value(double x) noexcept {
  return std::abs(x - std::round(x)) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
}

int beta_q(const ProblemParams& params) noexcept {
  const double g = gamma_q(params);
  if (is_integer_value(g)) return static_cast<int>(std::lround(g)) - 1;
  return static_cast<int>(std::floor(g));
}

int k_bar(const ProblemParams& params) noexcept {
  const double twice = 2.0 * gamma_q(params);
  if (is_integer_value(twice)) return static_cast<int>(std::lround(twice));
  return static_cast<int>(std::ceil(twice));
}

double lambda_nq(const ProblemParams& params, int dimension) noexcept {
  const double g = gamma_q(params);
  return g * (dimension - 2 + g);
}

DerivedExponents derived_exponents(const ProblemParams& params, int dimension) noexcept {
  return {gamma_q(params), beta_q(params), lambda_nq(params, dimension), k_bar(params)};
}

std::vector<double> beta_k_gaps(const ProblemParams& params, int count,
                                const std::optional<std::vector<double>>& deltas) {
  if (count < 1) throw Error(ErrorKind::Argument, "beta_k_sequence: count must be >= 1");
  const double q = params.q();
  if (deltas) {
    if (static_cast<int>(deltas->size()) != count) {
      throw Error(ErrorKind::Argument, "beta_k_sequence: expected one delta per term");
    }
    for (int k = 1; k <= count; ++k) {
      const double d = (*deltas)[k - 1];
      if (!(d >= 0.0 && d < std::ldexp(1.0, -k))) {
        std::ostringstream msg;
        msg << "beta_k_sequence: delta_" << k << " = " << d << " outside [0, 2^-" << k << ")";
        throw Error(ErrorKind::Argument, msg.str());
      }
    }
  } else if (q == 1.0) {
    throw Error(ErrorKind::Precondition,
                "beta_k_sequence: automatic deltas need 1 < q < 2 (beta_1 = 2 is already critical for q = 1)");
  }

  // With e_k = gamma_q - beta_k the recurrence reads e_k = (q-1) e_{k-1} + delta_k,
  // which stays exact long after beta_k itself rounds to gamma_q.
  const double g = gamma_q(params);
  std::vector<double> gap;
  gap.reserve(count);
  gap.push_back(g - (q + 1.0));
  for (int k = 2; k <= count; ++k) {
    const double shrunk = (q - 1.0) * gap.back();
    double delta = 0.0;
    if (deltas) {
      delta = (*deltas)[k - 1];
    } else {
      // The undamped term gamma_q - shrunk is an integer iff shrunk equals
      // the distance from gamma_q down to some integer.
      const double below = g - std::floor(g);
      const bool integral = std::abs(below - shrunk) <= 4.0 * std::numeric_limits<double>::epsilon() * g;
      if (integral) delta = std::min(std::ldexp(1.0, -k - 1), 0.5 * (2.0 - q) * gap.back());
    }
    gap.push_back(shrunk + delta);
  }
  return gap;
}

std::vector<double> beta_k_sequence(const ProblemParams& params, int count,
                                    const std::optional<std::vector<double>>& deltas) {
  auto beta = beta_k_gaps(params, count, deltas);
  const double g = gamma_q(params);
  for (double& b : beta) b = g - b;
  return beta;
}

std::vector<double> sigma_k_sequence(const ProblemParams& params, int count) {
  if (count < 1) throw Error(ErrorKind::Argument, "sigma_k_sequence: count must be >= 1");
  const double q = params.q();
  std::vector<double> sigma{1.0};
  sigma.reserve(count + 1);
  for (int k = 1; k <= count; ++k) {
    const double prev = sigma.back();
    sigma.push_back(0.5 * ((2.0 + q * prev) / 2.0) + 0.5 * prev);
  }
  return sigma;
}

}  // namespace nodallab
