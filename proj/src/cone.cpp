#include "reflector/detail/cone.hpp"

#include <algorithm>
#include <cmath>

#include "reflector/nnls.hpp"

namespace refl::detail {

namespace {

Eigen::MatrixXd as_columns(const std::vector<Vec3>& v) {
  Eigen::MatrixXd A(3, static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) A.col(static_cast<Eigen::Index>(k)) = v[k];
  return A;
}

std::vector<Vec3> arc(const Vec3& a, const Vec3& b, double spacing, bool include_end) {
  const double angle = geodesic_distance(a, b);
  const int steps = std::max(1, static_cast<int>(std::ceil(angle / spacing)));
  std::vector<Vec3> out;
  for (int s = 0; s <= (include_end ? steps : steps - 1); ++s) {
    const double t = static_cast<double>(s) / steps;
    // Normalized chord interpolation keeps the samples inside the cone.
    out.push_back(((1.0 - t) * a + t * b).normalized());
  }
  return out;
}

}  // namespace

Vec3 project_to_cone(const std::vector<Vec3>& generators, const Vec3& v) {
  if (generators.empty()) return v;
  if (generators.size() == 1) return generators.front();
  const auto res = nnls(as_columns(generators), v);
  const Vec3 p = as_columns(generators) * res.x;
  return p.norm() > 1e-14 ? Vec3(p.normalized()) : generators.front();
}

std::vector<Vec3> extreme_rays(const std::vector<Vec3>& generators, double tol) {
  std::vector<Vec3> uniq;
  for (const auto& d : unique_directions(generators, 1e-12)) uniq.push_back(d.vec());
  if (uniq.size() <= 1) return uniq;
  std::vector<Vec3> out;
  for (std::size_t k = 0; k < uniq.size(); ++k) {
    std::vector<Vec3> others;
    for (std::size_t j = 0; j < uniq.size(); ++j) {
      if (j != k) others.push_back(uniq[j]);
    }
    if (nnls(as_columns(others), uniq[k]).residual > tol) out.push_back(uniq[k]);
  }
  return out;
}

std::vector<Vec3> sample_cone(const std::vector<Vec3>& generators, double spacing) {
  std::vector<Vec3> rays = extreme_rays(generators);
  if (rays.size() <= 1) return rays;
  if (rays.size() == 2) return arc(rays[0], rays[1], spacing, true);

  // Order the extreme rays around their mean and fan-triangulate the spherical polygon.
  const Vec3 center = [&] {
    Vec3 c = Vec3::Zero();
    for (const auto& r : rays) c += r;
    return Vec3(c.normalized());
  }();
  const auto [t1, t2] = tangent_basis(center);
  std::sort(rays.begin(), rays.end(), [&](const Vec3& a, const Vec3& b) {
    return std::atan2(a.dot(t2), a.dot(t1)) < std::atan2(b.dot(t2), b.dot(t1));
  });

  std::vector<Vec3> out;
  for (std::size_t k = 1; k + 1 < rays.size(); ++k) {
    const Vec3& a = rays[0];
    const Vec3& b = rays[k];
    const Vec3& c = rays[k + 1];
    const double span = std::max({geodesic_distance(a, b), geodesic_distance(b, c), geodesic_distance(a, c)});
    const int m = std::max(1, static_cast<int>(std::ceil(span / spacing)));
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; i + j <= m; ++j) {
        const double wa = static_cast<double>(m - i - j) / m;
        const double wb = static_cast<double>(i) / m;
        const double wc = static_cast<double>(j) / m;
        out.push_back((wa * a + wb * b + wc * c).normalized());
      }
    }
  }
  std::vector<Vec3> uniq;
  for (const auto& d : unique_directions(out, 1e-12)) uniq.push_back(d.vec());
  return uniq;
}

std::vector<Direction> unique_directions(const std::vector<Vec3>& v, double tol) {
  std::vector<Direction> out;
  for (const auto& x : v) {
    const bool seen = std::any_of(out.begin(), out.end(),
                                  [&](const Direction& d) { return (d.vec() - x).norm() <= tol; });
    if (!seen) out.push_back(Direction(x));
  }
  return out;
}

}  // namespace refl::detail
