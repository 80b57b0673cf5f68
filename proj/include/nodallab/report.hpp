#pragma once

#include <string>

#include <json.hpp>

#include "nodallab/circle.hpp"
#include "nodallab/error.hpp"
#include "nodallab/functionals.hpp"
#include "nodallab/nodal.hpp"
#include "nodallab/order.hpp"
#include "nodallab/params.hpp"

namespace nodallab::report {

using Json = nlohmann::ordered_json;

Json to_json(const ProblemParams& params);
Json to_json(const DerivedExponents& derived);
/// {k, T, t_bar, psi_residual, energy_drift, ode_residual, ...}; `profile_path` is omitted when empty.
Json to_json(const MatchingResult& result, const std::string& profile_path = {});
Json to_json(const OrderEstimate& estimate);
Json to_json(const HarmonicReport& report);
Json to_json(const TransitionEstimate& estimate);
Json to_json(const ProfileZeros& zeros);
Json to_json(const FunctionalTrace& trace);
Json error_json(const Error& error);

/// Two-space indentation plus a trailing newline; non-finite numbers become null.
std::string dump(const Json& json);

}  // namespace nodallab::report
