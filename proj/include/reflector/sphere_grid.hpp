#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "reflector/direction.hpp"
#include "reflector/error.hpp"

namespace refl {

/// Antipodally symmetric direction grid on S^1 (circle in the xy-plane) or S^2 (icosphere).
/// Immutable after construction.
class SphereGrid {
 public:
  using Face = std::array<std::size_t, 3>;

  SphereGrid(int dim, int level, std::vector<Direction> points, std::vector<Face> faces);

  int dim() const { return dim_; }
  int level() const { return level_; }
  std::size_t size() const { return points_.size(); }

  const Direction& point(std::size_t i) const { return points_[i]; }
  const Vec3& operator[](std::size_t i) const { return points_[i].vec(); }
  std::span<const Direction> points() const { return points_; }

  std::size_t antipode(std::size_t i) const { return antipode_[i]; }
  std::span<const std::size_t> neighbors(std::size_t i) const {
    return {adjacency_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  /// Maximum over points of the geodesic distance to the nearest neighbour (radians).
  double resolution() const { return resolution_; }

  /// Triangles for n = 2; consecutive segments are implied for n = 1.
  std::span<const Face> faces() const { return faces_; }

  /// Undirected neighbour pairs (i < j), each listed once.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  /// Index of the grid point closest to `x` (brute force).
  std::size_t nearest(const Vec3& x) const;

 private:
  int dim_;
  int level_;
  std::vector<Direction> points_;
  std::vector<Face> faces_;
  std::vector<std::size_t> antipode_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> adjacency_;
  double resolution_ = 0.0;
};

using GridPtr = std::shared_ptr<const SphereGrid>;

/// n = 1: 2^(level+3) equally spaced circle directions. n = 2: icosphere of the given
/// subdivision level (12 * 4^level ... 10 * 4^level + 2 vertices).
SphereGrid make_grid(int dim, int level);

GridPtr make_shared_grid(int dim, int level);

enum class Extremum { Maximize, Minimize };

namespace detail {

inline void require_finite(double v) {
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::NumericalEvaluation, "objective returned a non-finite value");
  }
}

template <class F>
Vec3 golden_on_circle(const Vec3& start, double radius, F& f, double sign, double tol) {
  const Vec3 t = circle_tangent(start);
  auto at = [&](double theta) { return geodesic_step(start, t, theta); };
  auto g = [&](double theta) {
    const double v = f(at(theta));
    require_finite(v);
    return sign * v;
  };
  constexpr double inv_phi = 0.6180339887498949;
  double a = -radius;
  double b = radius;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = g(c);
  double gd = g(d);
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
    }
  }
  const double best_theta = gc >= gd ? c : d;
  const double best = std::max(gc, gd);
  const double g0 = g(0.0);
  return best > g0 ? at(best_theta) : start;
}

// Nelder-Mead on tangent-plane coordinates, confined to a disk of the given radius.
template <class F>
Vec3 simplex_on_sphere(const Vec3& start, double radius, F& f, double sign, double tol) {
  const auto [t1, t2] = tangent_basis(start);
  auto to_sphere = [&](Eigen::Vector2d z) {
    const double r = z.norm();
    if (r < 1e-300) return start;
    const double len = std::min(r, radius);
    return geodesic_step<double>(start, (z.x() * t1 + z.y() * t2) / r, len);
  };
  auto clamp = [&](Eigen::Vector2d z) {
    const double r = z.norm();
    return r > radius ? Eigen::Vector2d(z * (radius / r)) : z;
  };
  // Minimize the negated objective when maximizing.
  auto cost = [&](const Eigen::Vector2d& z) {
    const double v = f(to_sphere(z));
    require_finite(v);
    return -sign * v;
  };

  const double step = std::max(radius / 4.0, 4.0 * tol);
  std::array<Eigen::Vector2d, 3> s = {Eigen::Vector2d(0, 0), Eigen::Vector2d(step, 0),
                                      Eigen::Vector2d(0, step)};
  std::array<double, 3> fs = {cost(s[0]), cost(s[1]), cost(s[2])};
  const double f_start = fs[0];

  auto order = [&] {
    for (int i = 1; i < 3; ++i) {
      for (int j = i; j > 0 && fs[j] < fs[j - 1]; --j) {
        std::swap(fs[j], fs[j - 1]);
        std::swap(s[j], s[j - 1]);
      }
    }
  };

  for (int it = 0; it < 2000; ++it) {
    order();
    const double size = std::max((s[1] - s[0]).norm(), (s[2] - s[0]).norm());
    if (size < tol) break;
    const Eigen::Vector2d centroid = 0.5 * (s[0] + s[1]);
    const Eigen::Vector2d xr = clamp(centroid + (centroid - s[2]));
    const double fr = cost(xr);
    if (fr < fs[0]) {
      const Eigen::Vector2d xe = clamp(centroid + 2.0 * (centroid - s[2]));
      const double fe = cost(xe);
      if (fe < fr) {
        s[2] = xe;
        fs[2] = fe;
      } else {
        s[2] = xr;
        fs[2] = fr;
      }
    } else if (fr < fs[1]) {
      s[2] = xr;
      fs[2] = fr;
    } else {
      const bool outside = fr < fs[2];
      const Eigen::Vector2d xc =
          outside ? Eigen::Vector2d(centroid + 0.5 * (xr - centroid))
                  : Eigen::Vector2d(centroid + 0.5 * (s[2] - centroid));
      const double fc = cost(xc);
      if (fc < (outside ? fr : fs[2])) {
        s[2] = xc;
        fs[2] = fc;
      } else {
        for (int i = 1; i < 3; ++i) {
          s[i] = s[0] + 0.5 * (s[i] - s[0]);
          fs[i] = cost(s[i]);
        }
      }
    }
  }
  order();
  return fs[0] < f_start ? to_sphere(s[0]) : start;
}

}  // namespace detail

/// Local search for an extremum of `objective` near `start`, within `radius` radians.
/// Golden-section along the circle for n = 1, a tangent-plane simplex for n = 2.
/// The returned point is never worse than `start`.
template <class F>
Direction refine_direction(int dim, const Direction& start, double radius, F&& objective,
                           Extremum mode, double tol) {
  const double sign = mode == Extremum::Maximize ? 1.0 : -1.0;
  if (dim == 1) {
    return Direction::from_unit(detail::golden_on_circle(start.vec(), radius, objective, sign, tol));
  }
  if (dim == 2) {
    return Direction::from_unit(detail::simplex_on_sphere(start.vec(), radius, objective, sign, tol));
  }
  throw Error(ErrorKind::UnsupportedDimension, "dim must be 1 or 2");
}

/// Sharpens a grid-level extremum: searches the geodesic cell of radius 2 x resolution
/// around grid point `start`.
template <class F>
Direction refine_direction(const SphereGrid& grid, std::size_t start, F&& objective, Extremum mode,
                           double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidInput, "tol must be positive");
  return refine_direction(grid.dim(), grid.point(start), 2.0 * grid.resolution(),
                          std::forward<F>(objective), mode, tol);
}

}  // namespace refl
