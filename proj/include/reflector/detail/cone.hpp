#pragma once

// Convex cones generated by finitely many unit vectors (normal cones of the reflector body at
// a surface point, generated by the outward normals of the active members).

#include <cstddef>
#include <vector>

#include "reflector/direction.hpp"

namespace refl::detail {

/// Closest unit direction of cone{generators} to v (v itself if the cone is empty).
Vec3 project_to_cone(const std::vector<Vec3>& generators, const Vec3& v);

/// Generators that are not nonnegative combinations of the others (after de-duplication).
std::vector<Vec3> extreme_rays(const std::vector<Vec3>& generators, double tol = 1e-9);

/// Unit directions of the cone sampled with geodesic spacing at most `spacing`.
std::vector<Vec3> sample_cone(const std::vector<Vec3>& generators, double spacing);

/// Removes near duplicates (Euclidean distance <= tol), keeping first occurrences.
std::vector<Direction> unique_directions(const std::vector<Vec3>& v, double tol);

}  // namespace refl::detail
