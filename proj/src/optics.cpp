#include "reflector/optics.hpp"

#include <algorithm>

namespace refl {

ReflectionRecord trace(const Reflector& R, const Direction& x, double eps) {
  ReflectionRecord rec{x, R.surface_point(x).position, {}, {}, {}, 0.0};
  for (const Direction& y : reflector_map(R, x, eps)) {
    const Vec3 d = x.vec() - y.vec();
    if (d.norm() < 1e-12) continue;
    const Direction u(d);
    const Direction out = reflect(x, u);
    rec.normals.push_back(u);
    rec.outgoing.push_back(out);
    rec.axes.push_back(y);
    rec.max_deviation = std::max(rec.max_deviation, (out.vec() - y.vec()).norm());
  }
  return rec;
}

}  // namespace refl
