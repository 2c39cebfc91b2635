#pragma once

#include <vector>

#include "reflector/reflector.hpp"

namespace refl {

struct SupportCheck {
  Direction y;
  double H;  // support function of the directrix points in direction -y
  double p;  // focal function of the reflector at y
};

/// Directrix points r_D(u) = 2 h(u) u on a direction grid.
struct DirectrixSurface {
  GridPtr grid;
  std::vector<Vec3> points;
  std::vector<SupportCheck> support_check;
};

/// r_D(u) = 2 h(u) u for every u of `grid`, with H(-y) against p(y) at every grid y.
DirectrixSurface directrix_from_support(const Reflector& R, GridPtr grid);

/// Points rho(x) (x - y) over the supporting axes y at x (the whole reflected normal cone,
/// sampled at grid resolution, at edge and vertex points).
std::vector<Vec3> directrix_from_map(const Reflector& R, const Direction& x, double eps = kMapEpsilon);

/// directrix_from_map over all grid directions and the edge/vertex directions of R.
std::vector<Vec3> directrix_map_cloud(const Reflector& R, double eps = kMapEpsilon);

/// H(-y) - p(y), H the support function of the support-based directrix on R's grid.
double directrix_support_identity(const Reflector& R, const Direction& y);

/// Symmetric Hausdorff distance between two point sets.
double hausdorff_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

/// max_u |h(u) u - r_D(u) / 2|: the directrix is the pedal surface scaled by 2.
double pedal_residual(const Reflector& R, const DirectrixSurface& D);

/// Largest violation of the supporting planes {<Z, -y> = p(y)} through each directrix point,
/// y the axis reflected at the contact point in direction u. Nonpositive (up to rounding)
/// means every point lies on the boundary of the convex hull.
double convexity_violation(const Reflector& R, const DirectrixSurface& D);

struct LevelProbe {
  std::vector<int> levels;
  std::vector<double> max_values;
  std::vector<double> ratios;  // max_values[k + 1] / max_values[k]
};

/// Largest turning angle between adjacent facets (segments for n = 1) of the polyhedral
/// directrix.
double max_turning_angle(const DirectrixSurface& D);

/// Turning angles of directrices sampled at increasing levels.
LevelProbe smoothness_probe(const std::vector<DirectrixSurface>& levels);

/// max over adjacent grid pairs of |grad h(u) - grad h(u')| for reflectors at increasing levels.
LevelProbe gradient_probe(const std::vector<const Reflector*>& levels);

}  // namespace refl
