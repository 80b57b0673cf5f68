#pragma once

#include <string>
#include <vector>

#include "nodallab/nodal_set.hpp"
#include "nodallab/trace.hpp"

namespace nodallab::svg {

/// Chains segments that share endpoints into polylines. Around each singular
/// point, vertices closer than 3 + sqrt(cluster_size/π) lattice spacings are
/// removed and every piece left is extended to the point, so the rays meeting
/// there come out as separate polylines.
std::vector<std::vector<Vec2>> polylines(const NodalSet& nodal);

/// Disk outline, one <polyline> per chain, one marker per singular point.
std::string nodal_svg(const NodalSet& nodal, int size_px = 600);

/// Line chart against log r; the value axis is logarithmic when every value
/// is positive and linear otherwise.
std::string trace_svg(const FunctionalTrace& trace, int width_px = 640, int height_px = 420);

}  // namespace nodallab::svg
