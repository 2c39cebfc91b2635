#pragma once

#include <vector>

#include "reflector/direction.hpp"
#include "reflector/error.hpp"
#include "reflector/reflector.hpp"

namespace refl {

/// y = x - 2 <x, u> u, without the orientation check.
template <typename Scalar>
Vector3<Scalar> reflect_unchecked(const Vector3<Scalar>& x, const Vector3<Scalar>& u) {
  return x - Scalar(2) * x.dot(u) * u;
}

/// Law of reflection for a ray leaving the focus along x and meeting a surface with outward
/// normal u. Requires <x, u> > 0.
template <typename Scalar>
BasicDirection<Scalar> reflect(const BasicDirection<Scalar>& x, const BasicDirection<Scalar>& u) {
  if (!(x.dot(u.vec()) > Scalar(0))) {
    throw Error(ErrorKind::Orientation, "normal does not face the incident ray (<x, u> <= 0)");
  }
  return BasicDirection<Scalar>::from_unit(reflect_unchecked(x.vec(), u.vec()));
}

struct ReflectionRecord {
  Direction x;
  Vec3 hit;
  std::vector<Direction> normals;
  std::vector<Direction> outgoing;
  std::vector<Direction> axes;  // supporting axes the rays are expected to follow
  double max_deviation = 0.0;   // max |outgoing - axis|
};

/// Reflects the ray along x at every supporting paraboloid of R at rho(x) x.
ReflectionRecord trace(const Reflector& R, const Direction& x, double eps = kMapEpsilon);

}  // namespace refl
