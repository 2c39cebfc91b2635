#pragma once

#include <cmath>
#include <limits>

#include "reflector/direction.hpp"
#include "reflector/error.hpp"

namespace refl {

/// Guard on 1 - <x, y>: closer to the axis the polar radius is meaningless in double.
inline constexpr double kAxisGuard = 1e-10;

/// Paraboloid of revolution with focus at the origin, axis `y` pointing into its opening.
/// An infinite focal parameter marks the improper paraboloid whose solid is all of space.
template <typename Scalar>
class Paraboloid {
 public:
  Paraboloid(const BasicDirection<Scalar>& axis, Scalar focal_param)
      : axis_(axis), focal_param_(focal_param) {
    if (!(focal_param > Scalar(0))) {
      throw Error(ErrorKind::DegenerateFocalParameter, "focal parameter must be positive");
    }
  }

  static Paraboloid improper(const BasicDirection<Scalar>& axis) {
    return Paraboloid(axis, std::numeric_limits<Scalar>::infinity());
  }

  const BasicDirection<Scalar>& axis() const { return axis_; }
  Scalar focal_param() const { return focal_param_; }
  bool is_proper() const { return focal_param_ < std::numeric_limits<Scalar>::infinity(); }

 private:
  BasicDirection<Scalar> axis_;
  Scalar focal_param_;
};

/// The set {Z : <Z, normal> = offset}.
template <typename Scalar>
struct Hyperplane {
  BasicDirection<Scalar> normal;
  Scalar offset;

  Scalar signed_distance(const Vector3<Scalar>& z) const { return z.dot(normal.vec()) - offset; }
};

template <typename Scalar>
struct Containment {
  bool inside;
  Scalar slack;  // p - (|X| - <X, y>); zero on the surface
};

namespace detail {
template <typename Scalar>
void require_proper(const Paraboloid<Scalar>& P) {
  if (!P.is_proper()) throw Error(ErrorKind::ImproperParaboloid, "paraboloid has infinite focal parameter");
}

template <typename Scalar>
void require_off_axis(const Paraboloid<Scalar>& P, const Vector3<Scalar>& x) {
  if (!(Scalar(1) - x.dot(P.axis().vec()) > Scalar(kAxisGuard))) {
    throw Error(ErrorKind::AxisSingularity, "direction coincides with the paraboloid axis");
  }
}
}  // namespace detail

/// rho_y(x) = p / (1 - <x, y>).
template <typename Scalar>
Scalar polar_radius(const Paraboloid<Scalar>& P, const BasicDirection<Scalar>& x) {
  detail::require_proper(P);
  detail::require_off_axis(P, x.vec());
  return P.focal_param() / (Scalar(1) - x.dot(P.axis().vec()));
}

/// Membership in the closed solid bounded by P, via |X| - <X, y> <= p.
template <typename Scalar>
Containment<Scalar> contains(const Paraboloid<Scalar>& P, const Vector3<Scalar>& X, Scalar tol = Scalar(0)) {
  if (!P.is_proper()) return {true, std::numeric_limits<Scalar>::infinity()};
  const Scalar slack = P.focal_param() - (X.norm() - X.dot(P.axis().vec()));
  return {slack >= -tol, slack};
}

/// Outward unit normal of P at the surface point in direction x: (x - y) / |x - y|.
template <typename Scalar>
BasicDirection<Scalar> tangent_normal(const Paraboloid<Scalar>& P, const BasicDirection<Scalar>& x) {
  detail::require_off_axis(P, x.vec());
  return BasicDirection<Scalar>(Vector3<Scalar>(x.vec() - P.axis().vec()));
}

/// Classical directrix {Z : <Z, -y> = p}.
template <typename Scalar>
Hyperplane<Scalar> directrix_hyperplane(const Paraboloid<Scalar>& P) {
  detail::require_proper(P);
  return {-P.axis(), P.focal_param()};
}

/// The unique confocal paraboloid with axis y whose surface passes through X.
template <typename Scalar>
Paraboloid<Scalar> paraboloid_through(const Vector3<Scalar>& X, const BasicDirection<Scalar>& y) {
  const Scalar p = X.norm() - X.dot(y.vec());
  if (!(p > Scalar(kAxisGuard) * X.norm())) {
    throw Error(ErrorKind::DegenerateFocalParameter, "point lies on the axis ray (or is the focus)");
  }
  return Paraboloid<Scalar>(y, p);
}

}  // namespace refl
