#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "reflector/direction.hpp"
#include "reflector/sphere_grid.hpp"

namespace refl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Focal parameters sampled on a direction grid. Infinite entries are improper paraboloids,
/// i.e. directions that do not belong to the generating family.
class FocalField {
 public:
  FocalField(GridPtr grid, std::vector<double> values);

  const SphereGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int dim() const { return grid_->dim(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::size_t finite_count() const { return finite_count_; }
  /// Largest finite value (0 when none is finite).
  double p_max() const { return p_max_; }

  FocalField scaled(double c) const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
  std::size_t finite_count_ = 0;
  double p_max_ = 0.0;
};

/// The finite members of a focal field: the paraboloids whose solids are intersected.
class Family {
 public:
  Family() = default;
  Family(std::vector<Vec3> axes, std::vector<double> params, int dim);
  explicit Family(const FocalField& p);

  int dim() const { return dim_; }
  std::size_t size() const { return axes_.size(); }
  const Vec3& axis(std::size_t j) const { return axes_[j]; }
  double param(std::size_t j) const { return params_[j]; }

  /// Polar radius of member j in direction x (infinite on its axis).
  double face_radius(std::size_t j, const Vec3& x) const {
    const double denom = 1.0 - x.dot(axes_[j]);
    return denom > 1e-300 ? params_[j] / denom : kInf;
  }

  /// rho(x) = min_j p_j / (1 - <x, y_j>).
  double radius(const Vec3& x) const;
  /// Radius together with the index of a minimizing member.
  std::pair<double, std::size_t> radius_and_face(const Vec3& x) const;

  /// Members that can attain the minimum somewhere in the geodesic cap (center, angle).
  Family restricted_to_cap(const Vec3& center, double angle) const;

  double min_param() const;

 private:
  std::vector<Vec3> axes_;
  std::vector<double> params_;
  int dim_ = 2;
};

/// A nested coarse grid with, for every coarse point, the fine points within 2 coarse
/// resolutions. Used to restrict grid scans on fine grids.
struct CoarseIndex {
  GridPtr grid;
  std::vector<double> values;
  std::vector<std::vector<std::uint32_t>> cover;
};

/// Radial function sampled on a grid. When derived from a focal field it keeps the generating
/// family so that off-grid values are exact.
struct RadialField {
  GridPtr grid;
  std::vector<double> values;
  std::shared_ptr<const Family> family;
  std::vector<std::size_t> face;  // a minimizing member per grid point (with family)
  std::vector<Family> local;      // members that can be minimal within local_angle of each point
  double local_angle = 0.0;
  std::shared_ptr<const CoarseIndex> coarse;
  std::function<double(const Vec3&)> evaluator;

  const SphereGrid& grid_ref() const { return *grid; }
  bool continuous() const { return family != nullptr || static_cast<bool>(evaluator); }
  /// Exact value off the grid; requires continuous().
  double at(const Vec3& x) const;
};

struct SurfacePoint {
  Direction direction;
  double radius;
  Vec3 position;
};

struct SupportValue {
  double h;
  Vec3 contact;  // the (unique) point of the reflector on the supporting plane
};

struct FocalValue {
  double value;
  Vec3 argmax;  // a point of the reflector attaining the sup (origin for Y = 0)
};

/// A convex reflector: boundary of the intersection of the solid paraboloids of a focal field.
/// All derived samples live on one evaluation grid. Immutable once built.
class Reflector {
 public:
  const FocalField& focal() const { return focal_; }
  const Family& family() const { return *family_; }
  const std::shared_ptr<const Family>& family_ptr() const { return family_; }
  const RadialField& radial() const { return radial_; }
  const SphereGrid& grid() const { return *radial_.grid; }
  const GridPtr& grid_ptr() const { return radial_.grid; }
  int dim() const { return focal_.dim(); }
  double tol() const { return tol_; }

  double radius(const Vec3& x) const { return family_->radius(x); }
  SurfacePoint surface_point(const Direction& x) const;

  /// h(u_i) on the evaluation grid, its sphere gradient (tangential part of the contact point)
  /// and the contact points.
  std::span<const double> support() const { return support_; }
  std::span<const Vec3> support_gradient() const { return gradient_; }
  std::span<const Vec3> contacts() const { return contacts_; }

  /// Focal function of the reflector (sup transform of rho) on the evaluation grid.
  std::span<const double> closed_focal() const { return closed_focal_; }

  /// Surface directions on edges and vertices (where several members are active),
  /// found by bracketing sign changes of the active member along grid edges.
  std::span<const Direction> skeleton() const { return skeleton_; }

  /// max_u h(u) + h(-u) over the grid.
  double diameter() const { return diameter_; }

 private:
  friend Reflector build_reflector(const FocalField& p, int eval_level, double tol);

  Reflector(FocalField focal, std::shared_ptr<const Family> family, RadialField radial, double tol)
      : focal_(std::move(focal)), family_(std::move(family)), radial_(std::move(radial)), tol_(tol) {}

  FocalField focal_;
  std::shared_ptr<const Family> family_;
  RadialField radial_;
  double tol_;
  std::vector<double> support_;
  std::vector<Vec3> gradient_;
  std::vector<Vec3> contacts_;
  std::vector<double> closed_focal_;
  std::vector<Direction> skeleton_;
  double diameter_ = 0.0;
};

inline constexpr double kRefineTol = 1e-9;
inline constexpr double kMapEpsilon = 1e-7;

/// rho(x) = inf_y p(y) / (1 - <x, y>) on eval_grid. Finite-family semantics: only finite
/// entries of p participate, so the inf is an exact min over a discrete set.
RadialField radial_from_focal(const FocalField& p, GridPtr eval_grid, double tol = kRefineTol);

/// p(y) = sup_x rho(x) (1 - <x, y>) on eval_grid, sharpened off-grid when rho is continuous.
FocalField focal_from_radial(const RadialField& rho, GridPtr eval_grid, double tol = kRefineTol);

Reflector build_reflector(const FocalField& p, int eval_level, double tol = kRefineTol);

/// Axes y of paraboloids supporting R at rho(x) x: grid directions with
/// p(y) - rho(x)(1 - <x, y>) <= eps p(y), plus the generating members active at x.
std::vector<Direction> reflector_map(const Reflector& R, const Direction& x, double eps = kMapEpsilon);

SupportValue support_function(const Reflector& R, const Direction& u);

/// X(u) = h(u) u + grad h(u), gradient by central differences with step resolution / 2.
Vec3 surface_from_support(const Reflector& R, const Direction& u);

/// sup over the body of |X||Y| - <X, Y>; for unit Y this is the focal function at Y.
FocalValue focal_transform(const Reflector& R, const Vec3& Y);

/// Members active at direction x: f_j(x) <= rho(x) (1 + eps).
std::vector<std::size_t> active_members(const Family& family, const Vec3& x, double eps);

}  // namespace refl
