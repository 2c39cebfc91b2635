#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <utility>

#include "reflector/error.hpp"

namespace refl {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

using Vec3 = Vector3<double>;

/// A point of the unit sphere S^n. Both n = 1 and n = 2 are stored in R^3;
/// circle directions keep a zero z component.
template <typename Scalar>
class BasicDirection {
 public:
  BasicDirection() : v_(Vector3<Scalar>::UnitZ()) {}

  /// Normalizes `v`. Zero or non-finite input is rejected.
  explicit BasicDirection(const Vector3<Scalar>& v) {
    using std::isfinite;
    const Scalar n = v.norm();
    if (!(n > Scalar(0)) || !isfinite(n)) {
      throw Error(ErrorKind::InvalidInput, "direction from zero or non-finite vector");
    }
    v_ = v / n;
  }

  BasicDirection(Scalar x, Scalar y, Scalar z) : BasicDirection(Vector3<Scalar>(x, y, z)) {}

  /// Wraps a vector that is already unit length up to rounding.
  static BasicDirection from_unit(const Vector3<Scalar>& v) {
    BasicDirection d;
    d.v_ = v;
    return d;
  }

  const Vector3<Scalar>& vec() const { return v_; }
  operator const Vector3<Scalar>&() const { return v_; }

  Scalar operator[](Eigen::Index i) const { return v_[i]; }
  Scalar dot(const Vector3<Scalar>& w) const { return v_.dot(w); }

  BasicDirection operator-() const { return from_unit(-v_); }

 private:
  Vector3<Scalar> v_;
};

using Direction = BasicDirection<double>;

/// Geodesic (great-circle) distance between two unit vectors.
template <typename DerivedA, typename DerivedB>
auto geodesic_distance(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using std::atan2;
  return atan2(a.cross(b).norm(), a.dot(b));
}

/// Orthonormal pair spanning the tangent plane at unit vector `u`.
template <typename Scalar>
std::pair<Vector3<Scalar>, Vector3<Scalar>> tangent_basis(const Vector3<Scalar>& u) {
  using std::abs;
  const Vector3<Scalar> helper =
      abs(u.x()) < Scalar(0.6) ? Vector3<Scalar>::UnitX()
      : abs(u.y()) < Scalar(0.6) ? Vector3<Scalar>::UnitY()
                                 : Vector3<Scalar>::UnitZ();
  Vector3<Scalar> t1 = (helper - helper.dot(u) * u).normalized();
  Vector3<Scalar> t2 = u.cross(t1);
  return {t1, t2};
}

/// In-plane tangent of a circle direction (counter-clockwise).
template <typename Scalar>
Vector3<Scalar> circle_tangent(const Vector3<Scalar>& u) {
  return Vector3<Scalar>(-u.y(), u.x(), Scalar(0)).normalized();
}

/// Exponential map of the sphere: walk `length` along unit tangent `t` from `u`.
template <typename Scalar>
Vector3<Scalar> geodesic_step(const Vector3<Scalar>& u, const Vector3<Scalar>& t, Scalar length) {
  using std::cos;
  using std::sin;
  return (cos(length) * u + sin(length) * t).normalized();
}

}  // namespace refl
