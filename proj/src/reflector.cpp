#include "reflector/reflector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "reflector/detail/cone.hpp"
#include "reflector/detail/surface_max.hpp"
#include "reflector/optics.hpp"
#include "reflector/parallel.hpp"

namespace refl {

// ---------------------------------------------------------------------------------------------
// FocalField / Family

FocalField::FocalField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw Error(ErrorKind::InvalidInput, "focal field without grid");
  if (values_.size() != grid_->size()) {
    throw Error(ErrorKind::InvalidInput, "focal field size does not match its grid");
  }
  for (double v : values_) {
    if (!(v > 0.0)) throw Error(ErrorKind::InvalidInput, "focal values must be positive");
    if (std::isfinite(v)) {
      ++finite_count_;
      p_max_ = std::max(p_max_, v);
    }
  }
}

FocalField FocalField::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorKind::InvalidInput, "scale must be positive");
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  return FocalField(grid_, std::move(v));
}

Family::Family(std::vector<Vec3> axes, std::vector<double> params, int dim)
    : axes_(std::move(axes)), params_(std::move(params)), dim_(dim) {
  if (axes_.size() != params_.size()) throw Error(ErrorKind::InvalidInput, "family size mismatch");
}

Family::Family(const FocalField& p) : dim_(p.dim()) {
  for (std::size_t i = 0; i < p.grid().size(); ++i) {
    if (std::isfinite(p[i])) {
      axes_.push_back(p.grid()[i]);
      params_.push_back(p[i]);
    }
  }
}

double Family::radius(const Vec3& x) const {
  double best = kInf;
  for (std::size_t j = 0; j < axes_.size(); ++j) {
    const double denom = 1.0 - x.dot(axes_[j]);
    if (denom > 1e-300) best = std::min(best, params_[j] / denom);
  }
  return best;
}

std::pair<double, std::size_t> Family::radius_and_face(const Vec3& x) const {
  double best = kInf;
  std::size_t arg = 0;
  for (std::size_t j = 0; j < axes_.size(); ++j) {
    const double r = face_radius(j, x);
    if (r < best) {
      best = r;
      arg = j;
    }
  }
  return {best, arg};
}

Family Family::restricted_to_cap(const Vec3& center, double angle) const {
  const std::size_t m = axes_.size();
  std::vector<double> theta(m);
  double upper = kInf;
  for (std::size_t j = 0; j < m; ++j) {
    theta[j] = geodesic_distance(center, axes_[j]);
    const double closest = std::max(theta[j] - angle, 0.0);
    const double denom = 1.0 - std::cos(closest);
    if (denom > 0.0) upper = std::min(upper, params_[j] / denom);
  }
  if (!std::isfinite(upper)) return *this;
  Family out;
  out.dim_ = dim_;
  for (std::size_t j = 0; j < m; ++j) {
    const double farthest = std::min(theta[j] + angle, std::numbers::pi);
    const double lower = params_[j] / (1.0 - std::cos(farthest));
    if (lower <= upper * (1.0 + 1e-12)) {
      out.axes_.push_back(axes_[j]);
      out.params_.push_back(params_[j]);
    }
  }
  return out;
}

double Family::min_param() const {
  double m = kInf;
  for (double p : params_) m = std::min(m, p);
  return m;
}

double RadialField::at(const Vec3& x) const {
  if (family) return family->radius(x);
  if (evaluator) return evaluator(x);
  throw Error(ErrorKind::NotEvaluable, "radial field has no off-grid evaluator");
}

std::vector<std::size_t> active_members(const Family& family, const Vec3& x, double eps) {
  const double r = family.radius(x);
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < family.size(); ++j) {
    if (family.face_radius(j, x) <= r * (1.0 + eps)) out.push_back(j);
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Transforms

namespace {

void require_same_dim(int a, int b) {
  if (a != b) throw Error(ErrorKind::InvalidInput, "grid dimensions differ");
}

void require_bounded(const FocalField& p) {
  if (p.finite_count() < 2) {
    throw Error(ErrorKind::UnboundedReflector,
                "fewer than two finite focal parameters: the intersection is not compact");
  }
}

}  // namespace

RadialField radial_from_focal(const FocalField& p, GridPtr eval_grid, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidInput, "tol must be positive");
  require_same_dim(p.dim(), eval_grid->dim());
  require_bounded(p);
  auto family = std::make_shared<const Family>(p);
  RadialField out{std::move(eval_grid), {}, family, {}, {}, 0.0, {}, {}};
  const SphereGrid& g = *out.grid;
  out.values.resize(g.size());
  out.face.resize(g.size());
  out.local.resize(g.size());
  out.local_angle = 2.0 * g.resolution() * (1.0 + 1e-6);
  parallel_for(g.size(), [&](std::size_t i) {
    std::tie(out.values[i], out.face[i]) = family->radius_and_face(g[i]);
    out.local[i] = family->restricted_to_cap(g[i], out.local_angle);
  });
  if (g.dim() == 2 && g.level() >= 4) {
    auto coarse = std::make_shared<CoarseIndex>();
    coarse->grid = make_shared_grid(2, g.level() - 2);
    const SphereGrid& c = *coarse->grid;
    coarse->values.resize(c.size());
    coarse->cover.resize(c.size());
    const double reach = std::cos(2.0 * c.resolution());
    parallel_for(c.size(), [&](std::size_t k) {
      coarse->values[k] = family->radius(c[k]);
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i].dot(c[k]) >= reach) coarse->cover[k].push_back(static_cast<std::uint32_t>(i));
      }
    });
    out.coarse = std::move(coarse);
  }
  return out;
}

FocalField focal_from_radial(const RadialField& rho, GridPtr eval_grid, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidInput, "tol must be positive");
  const SphereGrid& xs = *rho.grid;
  require_same_dim(xs.dim(), eval_grid->dim());
  for (double r : rho.values) {
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::InvalidInput, "radial values must be positive and finite");
  }
  const SphereGrid& ys = *eval_grid;
  std::vector<double> out(ys.size());
  if (rho.family) {
    parallel_for(ys.size(), [&](std::size_t i) {
      out[i] = detail::maximize_on_surface(rho, detail::FocalObjective(ys[i]), 1, tol).value;
    });
  } else {
    parallel_for(ys.size(), [&](std::size_t i) {
      const Vec3& y = ys[i];
      std::size_t arg = 0;
      double best = -kInf;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        const double v = rho.values[k] * (1.0 - xs[k].dot(y));
        if (v > best) {
          best = v;
          arg = k;
        }
      }
      if (rho.evaluator) {
        auto f = [&](const Vec3& x) { return rho.evaluator(x) * (1.0 - x.dot(y)); };
        const Direction x = refine_direction(xs, arg, f, Extremum::Maximize, tol);
        best = std::max(best, f(x.vec()));
      }
      out[i] = best;
    });
  }
  return FocalField(std::move(eval_grid), std::move(out));
}

FocalValue focal_transform(const Reflector& R, const Vec3& Y) {
  if (Y.norm() == 0.0) return {0.0, Vec3::Zero()};
  const auto m = detail::maximize_on_surface(R.radial(), detail::FocalObjective(Y), 1, kRefineTol);
  return {m.value, m.point};
}

SupportValue support_function(const Reflector& R, const Direction& u) {
  const auto m = detail::maximize_on_surface(R.radial(), detail::LinearObjective{u.vec()}, 1, kRefineTol);
  return {m.value, m.point};
}

namespace {

Vec3 sphere_gradient(const Reflector& R, const Vec3& u, double step) {
  auto h_at = [&](const Vec3& v) { return support_function(R, Direction::from_unit(v)).h; };
  auto along = [&](const Vec3& t) {
    return (h_at(geodesic_step(u, t, step)) - h_at(geodesic_step(u, t, -step))) / (2.0 * step) * t;
  };
  if (R.dim() == 1) return along(circle_tangent(u));
  const auto [t1, t2] = tangent_basis(u);
  return along(t1) + along(t2);
}

// Directions where two members cross along grid edges (edges of R), and for n = 2 where
// three members meet inside a grid triangle (vertices of R).
std::vector<Direction> find_skeleton(const Family& fam, const SphereGrid& g) {
  std::vector<std::size_t> face(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) face[i] = fam.radius_and_face(g[i]).second;

  std::vector<Direction> out;
  auto accept = [&](const Vec3& x, std::initializer_list<std::size_t> members) {
    const double r = fam.radius(x);
    for (std::size_t j : members) {
      if (fam.face_radius(j, x) > r * (1.0 + 1e-9)) return;
    }
    out.push_back(Direction(x));
  };

  for (const auto& [i, j] : g.edges()) {
    const std::size_t a = face[i], b = face[j];
    if (a == b) continue;
    const Vec3 xi = g[i], xj = g[j];
    const double span = geodesic_distance(xi, xj);
    const Vec3 t = (xj - xi.dot(xj) * xi).normalized();
    auto gap = [&](double s) {
      const Vec3 x = geodesic_step(xi, t, s);
      return fam.face_radius(a, x) - fam.face_radius(b, x);
    };
    double lo = 0.0, hi = span;
    if (gap(lo) > 0.0 || gap(hi) < 0.0) continue;
    for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (gap(mid) <= 0.0 ? lo : hi) = mid;
    }
    Vec3 x = geodesic_step(xi, t, 0.5 * (lo + hi));
    if (g.dim() == 1) {
      std::array<Vec3, 2> pts;
      const int k = detail::line_points(fam, a, fam.axis(a) - fam.axis(b), fam.param(b) - fam.param(a),
                                        Vec3::UnitZ(), 0.0, pts);
      for (int q = 0; q < k; ++q) {
        const Vec3 cand = pts[q].normalized();
        if (geodesic_distance(cand, x) < 1e-6) x = cand;
      }
    }
    accept(x, {a, b});
  }

  if (g.dim() == 2) {
    for (const auto& [i, j, k] : g.faces()) {
      const std::size_t a = face[i], b = face[j], c = face[k];
      if (a == b || b == c || a == c) continue;
      const Vec3 centroid = (g[i] + g[j] + g[k]).normalized();
      std::array<Vec3, 2> pts;
      const int n = detail::line_points(fam, a, fam.axis(a) - fam.axis(b), fam.param(b) - fam.param(a),
                                        fam.axis(a) - fam.axis(c), fam.param(c) - fam.param(a), pts);
      for (int q = 0; q < n; ++q) {
        const Vec3 x = pts[q].normalized();
        if (geodesic_distance(x, centroid) < 2.0 * g.resolution()) accept(x, {a, b, c});
      }
    }
  }
  return out;
}

}  // namespace

Reflector build_reflector(const FocalField& p, int eval_level, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidInput, "tol must be positive");
  GridPtr grid = make_shared_grid(p.dim(), eval_level);
  RadialField radial = radial_from_focal(p, grid, tol);
  const auto family = radial.family;

  // rho is minimal at the antipode of the member with the smallest parameter: min rho = min p / 2.
  const double min_rho = family->min_param() / 2.0;
  const double max_rho = *std::max_element(radial.values.begin(), radial.values.end());
  if (min_rho <= tol * max_rho) {
    throw Error(ErrorKind::DegenerateReflector, "origin is not strictly interior (min rho <= tol * max rho)");
  }

  Reflector R(p, family, std::move(radial), tol);
  const SphereGrid& g = *grid;
  const std::size_t n = g.size();
  R.support_.resize(n);
  R.contacts_.resize(n);
  R.gradient_.resize(n);
  R.closed_focal_.resize(n);

  parallel_for(n, [&](std::size_t i) {
    const auto s = support_function(R, g.point(i));
    R.support_[i] = s.h;
    R.contacts_[i] = s.contact;
  });
  parallel_for(n, [&](std::size_t i) {
    // X(u) = h(u) u + grad h(u) with X(u) the unique contact point.
    R.gradient_[i] = R.contacts_[i] - R.support_[i] * g[i];
    R.closed_focal_[i] = focal_transform(R, g[i]).value;
  });
  for (std::size_t i = 0; i < n; ++i) {
    R.diameter_ = std::max(R.diameter_, R.support_[i] + R.support_[g.antipode(i)]);
  }
  R.skeleton_ = find_skeleton(*family, g);
  return R;
}

SurfacePoint Reflector::surface_point(const Direction& x) const {
  const double r = radius(x.vec());
  return {x, r, r * x.vec()};
}

Vec3 surface_from_support(const Reflector& R, const Direction& u) {
  const double h = support_function(R, u).h;
  return h * u.vec() + sphere_gradient(R, u.vec(), 0.5 * R.grid().resolution());
}

// ---------------------------------------------------------------------------------------------
// Reflector map

std::vector<Direction> reflector_map(const Reflector& R, const Direction& x, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidInput, "eps must be positive");
  const Family& fam = R.family();
  const Vec3& xv = x.vec();
  const double rho = fam.radius(xv);

  std::vector<Vec3> generators;  // outward normals of the active members at rho(x) x
  std::vector<Vec3> axes;
  for (std::size_t j : active_members(fam, xv, eps)) {
    axes.push_back(fam.axis(j));
    generators.push_back((xv - fam.axis(j)).normalized());
  }

  const SphereGrid& g = R.grid();
  const auto pstar = R.closed_focal();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double gap = pstar[i] - rho * (1.0 - xv.dot(g[i]));
    if (gap > eps * pstar[i]) continue;
    const Vec3 y = g[i];
    const double len = (xv - y).norm();
    if (len < 1e-12) continue;
    // Snap onto the exact set {reflect(x, u) : u in the normal cone}.
    const Vec3 u = detail::project_to_cone(generators, (xv - y) / len);
    axes.push_back(geodesic_distance(u, (xv - y) / len) < g.resolution() ? reflect_unchecked(xv, u) : y);
  }
  return detail::unique_directions(axes, 1e-9);
}

}  // namespace refl
