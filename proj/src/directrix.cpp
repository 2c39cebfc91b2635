#include "reflector/directrix.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "reflector/optics.hpp"
#include "reflector/parallel.hpp"
#include "reflector/validity.hpp"

namespace refl {

DirectrixSurface directrix_from_support(const Reflector& R, GridPtr grid) {
  if (grid->dim() != R.dim()) throw Error(ErrorKind::InvalidInput, "grid dimension differs from the reflector");
  const SphereGrid& g = *grid;
  const bool own = grid == R.grid_ptr();
  DirectrixSurface D{grid, std::vector<Vec3>(g.size()), std::vector<SupportCheck>(g.size())};
  parallel_for(g.size(), [&](std::size_t i) {
    const double h = own ? R.support()[i] : support_function(R, g.point(i)).h;
    D.points[i] = 2.0 * h * g[i];
  });
  parallel_for(g.size(), [&](std::size_t i) {
    double H = -kInf;
    for (const Vec3& Z : D.points) H = std::max(H, -Z.dot(g[i]));
    const double p = own ? R.closed_focal()[i] : focal_transform(R, g[i]).value;
    D.support_check[i] = {g.point(i), H, p};
  });
  return D;
}

std::vector<Vec3> directrix_from_map(const Reflector& R, const Direction& x, double eps) {
  const double rho = R.radius(x.vec());
  std::vector<Vec3> out;
  for (const Direction& y : supporting_axes(R, x, eps)) out.push_back(rho * (x.vec() - y.vec()));
  return out;
}

std::vector<Vec3> directrix_map_cloud(const Reflector& R, double eps) {
  std::vector<Direction> xs(R.grid().points().begin(), R.grid().points().end());
  xs.insert(xs.end(), R.skeleton().begin(), R.skeleton().end());
  std::vector<std::vector<Vec3>> parts(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { parts[i] = directrix_from_map(R, xs[i], eps); });
  std::vector<Vec3> out;
  for (const auto& part : parts) out.insert(out.end(), part.begin(), part.end());
  return out;
}

double directrix_support_identity(const Reflector& R, const Direction& y) {
  const SphereGrid& g = R.grid();
  double H = -kInf;
  for (std::size_t i = 0; i < g.size(); ++i) H = std::max(H, -2.0 * R.support()[i] * g[i].dot(y.vec()));
  return H - focal_transform(R, y.vec()).value;
}

namespace {

double one_sided(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  std::vector<double> d(a.size());
  parallel_for(a.size(), [&](std::size_t i) {
    double best = kInf;
    for (const Vec3& q : b) best = std::min(best, (a[i] - q).squaredNorm());
    d[i] = best;
  });
  double worst = 0.0;
  for (double v : d) worst = std::max(worst, v);
  return std::sqrt(worst);
}

}  // namespace

double hausdorff_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::InsufficientData, "empty point set");
  return std::max(one_sided(a, b), one_sided(b, a));
}

double pedal_residual(const Reflector& R, const DirectrixSurface& D) {
  const SphereGrid& g = *D.grid;
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double h = D.grid == R.grid_ptr() ? R.support()[i] : support_function(R, g.point(i)).h;
    worst = std::max(worst, (h * g[i] - 0.5 * D.points[i]).norm());
  }
  return worst;
}

double convexity_violation(const Reflector& R, const DirectrixSurface& D) {
  const SphereGrid& g = *D.grid;
  std::vector<double> worst(g.size());
  parallel_for(g.size(), [&](std::size_t i) {
    const Vec3 X = D.grid == R.grid_ptr() ? R.contacts()[i] : support_function(R, g.point(i)).contact;
    const Vec3 y = reflect_unchecked(Vec3(X.normalized()), g[i]);
    const double level = -D.points[i].dot(y);
    double w = -kInf;
    for (const Vec3& Z : D.points) w = std::max(w, -Z.dot(y) - level);
    worst[i] = w;
  });
  return *std::max_element(worst.begin(), worst.end());
}

double max_turning_angle(const DirectrixSurface& D) {
  const SphereGrid& g = *D.grid;
  const auto& P = D.points;
  double worst = 0.0;
  if (g.dim() == 1) {
    const std::size_t n = P.size();
    for (std::size_t k = 0; k < n; ++k) {
      const Vec3 a = P[(k + 1) % n] - P[k];
      const Vec3 b = P[(k + 2) % n] - P[(k + 1) % n];
      worst = std::max(worst, geodesic_distance(a.normalized(), b.normalized()));
    }
    return worst;
  }
  const auto faces = g.faces();
  std::vector<Vec3> normal(faces.size());
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> by_edge;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& [a, b, c] = faces[f];
    Vec3 nrm = (P[b] - P[a]).cross(P[c] - P[a]).normalized();
    if (nrm.dot(P[a] + P[b] + P[c]) < 0.0) nrm = -nrm;
    normal[f] = nrm;
    for (auto [i, j] : {std::pair{a, b}, std::pair{b, c}, std::pair{c, a}}) {
      by_edge[{std::min(i, j), std::max(i, j)}].push_back(f);
    }
  }
  for (const auto& [edge, fs] : by_edge) {
    if (fs.size() == 2) worst = std::max(worst, geodesic_distance(normal[fs[0]], normal[fs[1]]));
  }
  return worst;
}

namespace {

LevelProbe make_probe(std::vector<int> levels, std::vector<double> values) {
  if (values.size() < 2) throw Error(ErrorKind::InsufficientData, "a convergence probe needs at least two levels");
  LevelProbe out{std::move(levels), std::move(values), {}};
  for (std::size_t k = 0; k + 1 < out.max_values.size(); ++k) {
    out.ratios.push_back(out.max_values[k + 1] / out.max_values[k]);
  }
  return out;
}

}  // namespace

LevelProbe smoothness_probe(const std::vector<DirectrixSurface>& levels) {
  std::vector<int> lv;
  std::vector<double> v;
  for (const auto& D : levels) {
    lv.push_back(D.grid->level());
    v.push_back(max_turning_angle(D));
  }
  return make_probe(std::move(lv), std::move(v));
}

LevelProbe gradient_probe(const std::vector<const Reflector*>& levels) {
  std::vector<int> lv;
  std::vector<double> v;
  for (const Reflector* R : levels) {
    const auto grad = R->support_gradient();
    double worst = 0.0;
    for (const auto& [i, j] : R->grid().edges()) worst = std::max(worst, (grad[i] - grad[j]).norm());
    lv.push_back(R->grid().level());
    v.push_back(worst);
  }
  return make_probe(std::move(lv), std::move(v));
}

}  // namespace refl
