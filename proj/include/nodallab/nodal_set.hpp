#pragma once

#include <vector>

#include "nodallab/field.hpp"

namespace nodallab {

struct Segment {
  Vec2 a;
  Vec2 b;

  double length() const { return norm(b - a); }
};

struct SingularPoint {
  Vec2 position;
  double abs_value;
  double grad_norm;
  std::size_t cluster_size;
};

/// Zero level set as line segments plus the detected singular points.
/// `grid_cells` and `radius` record the extraction lattice: (grid_cells+1)²
/// nodes on [-radius, radius]².
struct NodalSet {
  std::vector<Segment> segments;
  std::vector<SingularPoint> singular_points;
  std::size_t grid_cells = 0;
  double radius = 1.0;

  double spacing() const { return grid_cells == 0 ? 0.0 : 2.0 * radius / static_cast<double>(grid_cells); }
};

}  // namespace nodallab
