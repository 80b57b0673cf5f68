#pragma once

#include <vector>

#include "nodallab/field.hpp"
#include "nodallab/nodal_set.hpp"
#include "nodallab/profile.hpp"

namespace nodallab {

/// Marching squares on `cells` x `cells` cells covering [-radius, radius]²;
/// nodes with u >= 0 count as positive, saddle cells are resolved with the
/// field at the cell centre, and segments are clipped to the disk of `radius`.
NodalSet extract_nodal_set(const PlanarField& field, std::size_t cells, double radius = 1.0, unsigned jobs = 1);

/// Total segment length inside the closed disk of `radius` about the origin.
double nodal_length(const NodalSet& nodal, double radius);

struct SingularThresholds {
  double eps_u;
  double eps_g;
};

/// eps_u = 10 h^{min(γ_q, 2)} max|u|, eps_g = 10 h max|∇u|, maxima over the
/// extraction nodes inside the disk.
SingularThresholds default_thresholds(const PlanarField& field, const NodalSet& nodal);

/// Lattice nodes of `nodal` inside its disk with |u| < eps_u and |∇u| < eps_g,
/// grouped into 8-connected clusters, where two clusters also merge when the
/// segment joining them stays below both thresholds; each cluster is
/// represented by its node of smallest |∇u|. Stores the result in nodal.singular_points and returns it.
std::vector<SingularPoint> detect_singular(const PlanarField& field, NodalSet& nodal, double eps_u, double eps_g);
std::vector<SingularPoint> detect_singular(const PlanarField& field, NodalSet& nodal);

struct ProfileZeros {
  std::vector<double> zeros;   // θ in [0, 2π), increasing
  std::vector<double> slopes;  // φ' at each zero
  bool antipodal = false;      // zero set invariant under θ ↦ θ + π
  bool degenerate = false;     // identically zero profile
  double min_abs_slope = 0.0;
};

/// Sign changes of the samples (>= 0 counts as positive), refined by
/// bisection on the Hermite interpolant.
ProfileZeros profile_zero_structure(const AngularProfile& profile, double antipodal_tolerance = 1e-6);

}  // namespace nodallab
