#include "reflector/properties.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "reflector/directrix.hpp"
#include "reflector/optics.hpp"
#include "reflector/paraboloid.hpp"
#include "reflector/validity.hpp"

namespace refl {

namespace {

class Suite {
 public:
  std::vector<PropertyResult> results;

  // value <= threshold passes
  void at_most(std::string name, double value, double threshold) {
    results.push_back({std::move(name), value <= threshold, value, threshold});
  }
  void below(std::string name, double value, double threshold) {
    results.push_back({std::move(name), value < threshold, value, threshold});
  }
};

Vec3 gaussian(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> n;
  Vec3 v(n(rng), n(rng), dim == 2 ? n(rng) : 0.0);
  return v.norm() > 1e-12 ? v : Vec3(Vec3::UnitX());
}

Direction random_direction(std::mt19937_64& rng, int dim) { return Direction(gaussian(rng, dim)); }

double max_rel_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) && !std::isfinite(b[i])) continue;
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(std::abs(b[i]), 1e-300));
  }
  return worst;
}

FocalField raised(const FocalField& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> bump(1.0, 1.5);
  std::vector<double> v(p.values().begin(), p.values().end());
  for (double& x : v) {
    if (std::isfinite(x)) x *= bump(rng);
  }
  return FocalField(p.grid_ptr(), std::move(v));
}

void grid_properties(Suite& s, const SphereGrid& g, const Reflector& R, std::mt19937_64& rng) {
  double bad = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.antipode(g.antipode(i)) != i || (g[i] + g[g.antipode(i)]).norm() > 1e-15) ++bad;
  }
  s.at_most("grid.antipodal-involution", bad, 0);

  s.below("grid.resolution-decreases", make_grid(g.dim(), g.level() + 1).resolution() / g.resolution(), 1.0);

  std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
  double worse = 0.0;
  for (int k = 0; k < 20; ++k) {
    const std::size_t i = pick(rng);
    const Vec3 a = gaussian(rng, g.dim());
    auto f = [&](const Vec3& x) { return R.radius(x) * (1.0 + 0.3 * x.dot(a)); };
    const Extremum mode = k % 2 ? Extremum::Maximize : Extremum::Minimize;
    const Direction d = refine_direction(g, i, f, mode, kRefineTol);
    const double gain = f(d.vec()) - f(g[i]);
    worse = std::max(worse, mode == Extremum::Maximize ? -gain : gain);
  }
  s.at_most("grid.refine-never-worse", worse, 0.0);
}

void paraboloid_properties(Suite& s, const Family& fam, std::mt19937_64& rng) {
  constexpr double delta = 1e-6;
  double duality = 0;
  double roundtrip = 0.0;
  double through = 0.0;
  const std::size_t members = std::min<std::size_t>(fam.size(), 50);
  for (std::size_t j = 0; j < members; ++j) {
    const Paraboloid<double> P(Direction::from_unit(fam.axis(j)), fam.param(j));
    for (int k = 0; k < 10; ++k) {
      const Direction x = random_direction(rng, fam.dim());
      if (1.0 - x.dot(P.axis().vec()) < 1e-3) continue;
      const double r = polar_radius(P, x);
      const auto in = contains(P, Vec3(r * (1.0 - delta) * x.vec()));
      const auto out = contains(P, Vec3(r * (1.0 + delta) * x.vec()));
      if (!in.inside || !(in.slack > 0.0) || out.inside) ++duality;
      const Vec3 y = reflect_unchecked(x.vec(), tangent_normal(P, x).vec());
      roundtrip = std::max(roundtrip, (y - P.axis().vec()).norm());
      const Vec3 X = r * x.vec();
      const Direction axis = random_direction(rng, fam.dim());
      if (1.0 - x.dot(axis.vec()) < 1e-3) continue;
      const auto Q = paraboloid_through(X, axis);
      through = std::max(through, std::abs(contains(Q, X).slack) / X.norm());
    }
  }
  s.at_most("paraboloid.containment-duality", duality, 0);
  s.at_most("paraboloid.normal-reflect-roundtrip", roundtrip, 1e-12);
  s.at_most("paraboloid.through-on-surface", through, 1e-12);
}

void reflector_properties(Suite& s, const FocalField& p, const Reflector& R, const SuiteOptions& opt,
                          std::mt19937_64& rng) {
  const SphereGrid& g = R.grid();
  const auto rho = R.radial().values;
  const auto pstar = R.closed_focal();
  const double res = g.resolution();
  const double scale = 5.0 * res * R.diameter();

  double support = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double lhs = rho[i] * (1.0 - g[i].dot(g[j]));
      support = std::max(support, (lhs - pstar[j]) / pstar[j]);
      if (std::isfinite(p[j])) support = std::max(support, (lhs - p[j]) / p[j]);
    }
  }
  s.at_most("reflector.supporting-inequality", support, opt.tol);

  std::vector<std::size_t> finite;
  for (std::size_t j = 0; j < p.grid().size(); ++j) {
    if (std::isfinite(p[j])) finite.push_back(j);
  }
  std::uniform_int_distribution<std::size_t> pick(0, finite.size() - 1);
  double order = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (int k = 0; k < 10; ++k) {
      const std::size_t j = finite[pick(rng)];
      const double denom = 1.0 - g[i].dot(p.grid()[j]);
      if (denom <= kAxisGuard) continue;
      order = std::max(order, (rho[i] - p[j] / denom) / rho[i]);
    }
  }
  s.at_most("reflector.transform-order", order, opt.tol);

  const GridPtr eval = R.grid_ptr();
  const RadialField r2 = radial_from_focal(raised(p, rng), eval);
  double mono = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) mono = std::max(mono, (rho[i] - r2.values[i]) / r2.values[i]);
  s.at_most("reflector.radial-monotone", mono, opt.tol);

  constexpr double c = 2.5;
  const RadialField rc = radial_from_focal(p.scaled(c), eval);
  std::vector<double> scaled_rho(rho.begin(), rho.end());
  for (double& v : scaled_rho) v *= c;
  s.at_most("reflector.radial-homogeneous", max_rel_diff(rc.values, scaled_rho), opt.tol);
  const FocalField fc = focal_from_radial(rc, eval);
  std::vector<double> scaled_focal(pstar.begin(), pstar.end());
  for (double& v : scaled_focal) v *= c;
  s.at_most("reflector.focal-homogeneous", max_rel_diff(fc.values(), scaled_focal), opt.tol);

  std::vector<Vec3> covered;
  std::vector<Direction> xs(g.points().begin(), g.points().end());
  xs.insert(xs.end(), R.skeleton().begin(), R.skeleton().end());
  for (const Direction& x : xs) {
    for (const Direction& y : supporting_axes(R, x)) covered.push_back(y.vec());
  }
  std::vector<Vec3> grid_points;
  for (const Direction& d : g.points()) grid_points.push_back(d.vec());
  s.at_most("reflector.map-surjective", hausdorff_distance(covered, grid_points), 2.0 * res);

  double agree = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    agree = std::max(agree, std::abs(R.support()[i] - surface_from_support(R, g.point(i)).dot(g[i])));
  }
  s.at_most("reflector.support-reconstruction", agree, scale);

  const Reflector finer = build_reflector(p, g.level() + 1, R.tol());
  const LevelProbe probe = gradient_probe({&R, &finer});
  // Jumps at the optimizer's accuracy carry no ratio information.
  const bool resolved = probe.max_values.back() > opt.tol * R.diameter();
  s.results.push_back({"reflector.gradient-jump-ratio", !resolved || probe.ratios.front() < 0.7,
                       probe.ratios.front(), 0.7});
}

void validity_properties(Suite& s, const FocalField& p, const Reflector& R, const SuiteOptions& opt,
                         std::mt19937_64& rng) {
  const int level = R.grid().level();
  const int n = p.dim();
  const FocalField q = closure(p, level);
  double dominated = 0.0;
  for (std::size_t i = 0; i < p.grid().size(); ++i) {
    if (std::isfinite(p[i])) dominated = std::max(dominated, (q[i] - p[i]) / p[i]);
  }
  s.at_most("validity.closure-dominated", dominated, opt.tol);

  const FocalField q2 = closure(raised(p, rng), level);
  double mono = 0.0;
  for (std::size_t i = 0; i < q.grid().size(); ++i) mono = std::max(mono, (q[i] - q2[i]) / q2[i]);
  s.at_most("validity.closure-monotone", mono, opt.tol);

  const FocalField qc = closure(p.scaled(2.5), level);
  s.at_most("validity.closure-homogeneous", max_rel_diff(qc.values(), q.scaled(2.5).values()), opt.tol);

  const FocalField qq = closure(q, level);
  double diff = 0.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < q.grid().size(); ++i) {
    diff = std::max(diff, std::abs(qq[i] - q[i]));
    norm = std::max(norm, std::abs(q[i]));
  }
  s.at_most("validity.closure-idempotent", diff / norm, 1e-6);

  const Reflector Rq = build_reflector(q, level, R.tol());
  std::vector<Direction> xs(Rq.grid().points().begin(), Rq.grid().points().end());
  const std::size_t grid_count = xs.size();
  xs.insert(xs.end(), Rq.skeleton().begin(), Rq.skeleton().end());
  std::uniform_int_distribution<std::size_t> pick_x(0, xs.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_skel(grid_count, xs.size() - 1);
  double minkg = kInf;
  double residual = 0.0;
  double malformed = 0;
  for (int k = 0; k < opt.decomposition_points; ++k) {
    const bool edge = k % 2 == 1 && xs.size() > grid_count;
    const Direction& x = xs[edge ? pick_skel(rng) : pick_x(rng)];
    const auto axes = supporting_axes(Rq, x);
    std::uniform_int_distribution<std::size_t> pick_y(0, axes.size() - 1);
    const Decomposition d = find_decomposition(Rq, x, axes[pick_y(rng)]);
    residual = std::max(residual, d.residual);
    if (d.terms.empty() || d.terms.size() > static_cast<std::size_t>(n + 1)) ++malformed;
    for (const auto& t : d.terms) {
      if (t.alpha < 0.0) ++malformed;
    }
    minkg = std::min(minkg, check_minkg(q, d, &Rq));
  }
  s.at_most("validity.decomposition-residual", residual, kDecompositionTol);
  s.at_most("validity.decomposition-shape", malformed, 0);
  s.at_most("validity.necessity-minkg", -minkg, 1e-6);

  std::uniform_int_distribution<std::size_t> pick(0, R.grid().size() - 1);
  double extend = 0.0;
  for (int k = 0; k < 20; ++k) {
    const std::size_t i = pick(rng);
    const double v = extend_focal(R, R.grid()[i]).value;
    extend = std::max(extend, std::abs(v - R.closed_focal()[i]) / R.closed_focal()[i]);
  }
  s.at_most("validity.extension-consistent", extend, opt.tol);

  std::exponential_distribution<double> length(1.0);
  double sub = kInf;
  for (int k = 0; k < opt.subadditivity_pairs; ++k) {
    sub = std::min(sub, check_subadditivity(R, gaussian(rng, n), gaussian(rng, n)));
  }
  s.at_most("validity.subadditivity", -sub, 1e-9);

  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_real_distribution<double> weight(0.0, 2.0);
  double forward = kInf;
  double reverse = -kInf;
  double rhs = kInf;
  for (int k = 0; k < opt.refined_triples; ++k) {
    const int m = count(rng);
    std::vector<RefinedTerm> pos;
    std::vector<RefinedTerm> neg;
    for (int t = 0; t < m; ++t) {
      const double a = weight(rng);
      const Vec3 Y = length(rng) * random_direction(rng, n).vec();
      pos.push_back({a, Y});
      neg.push_back({-a, Y});
    }
    const RefinedResidual f = check_refined_inequality(R, pos);
    forward = std::min(forward, f.residual);
    rhs = std::min(rhs, f.rhs);
    reverse = std::max(reverse, check_refined_inequality(R, neg).residual);
  }
  s.at_most("validity.refined-inequality", -forward, 1e-8);
  s.at_most("validity.refined-rhs-nonnegative", -rhs, 1e-8);
  s.at_most("validity.refined-reverse", reverse, 1e-8);
}

void directrix_properties(Suite& s, const Reflector& R, const SuiteOptions& opt) {
  const SphereGrid& g = R.grid();
  const double scale = 5.0 * g.resolution() * R.diameter();
  const DirectrixSurface D = directrix_from_support(R, R.grid_ptr());
  s.at_most("directrix.dual-construction", hausdorff_distance(directrix_map_cloud(R), D.points), scale);

  double identity = 0.0;
  for (const auto& c : D.support_check) identity = std::max(identity, std::abs(c.H - c.p));
  s.at_most("directrix.support-identity", identity, scale);

  const double size = std::max(1.0, R.diameter());
  s.at_most("directrix.pedal", pedal_residual(R, D), opt.tol * size);
  s.at_most("directrix.convex-hull-boundary", convexity_violation(R, D), opt.tol * size);

  double slack = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double rho = R.radial().values[i];
    for (const Direction& y : reflector_map(R, g.point(i))) {
      const Vec3 Z = rho * (g[i] - y.vec());
      const double py = focal_transform(R, y.vec()).value;
      slack = std::max(slack, std::abs(-Z.dot(y.vec()) - py) / py);
    }
  }
  s.at_most("directrix.hyperplane-slack", slack, opt.tol);
}

void optics_properties(Suite& s, const Reflector& R, const SuiteOptions& opt, std::mt19937_64& rng) {
  const SphereGrid& g = R.grid();
  const Family& fam = R.family();
  double beam = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto ys = reflector_map(R, g.point(i));
    if (ys.size() != 1) continue;
    bool generating = false;
    for (std::size_t j = 0; j < fam.size() && !generating; ++j) {
      generating = (fam.axis(j) - ys.front().vec()).norm() <= 1e-12;
    }
    if (!generating) continue;
    const ReflectionRecord rec = trace(R, g.point(i));
    for (const Direction& out : rec.outgoing) beam = std::max(beam, (out.vec() - ys.front().vec()).norm());
  }
  s.at_most("optics.parallel-beam", beam, 1e-9);

  double involution = 0.0;
  double unit = 0.0;
  for (int k = 0; k < opt.reflect_pairs; ++k) {
    const Vec3 x = random_direction(rng, g.dim()).vec();
    const Vec3 u = random_direction(rng, g.dim()).vec();
    const Vec3 y = reflect_unchecked(x, u);
    involution = std::max(involution, (reflect_unchecked(y, u) - x).norm());
    unit = std::max(unit, std::abs(y.norm() - 1.0));
  }
  s.at_most("optics.reflect-involution", involution, 1e-12);
  s.at_most("optics.reflect-unit-norm", unit, 1e-12);
}

}  // namespace

std::vector<PropertyResult> run_property_suite(const FocalField& p, const SuiteOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  const Reflector R = build_reflector(p, opt.level);
  Suite s;
  grid_properties(s, R.grid(), R, rng);
  paraboloid_properties(s, R.family(), rng);
  reflector_properties(s, p, R, opt, rng);
  validity_properties(s, p, R, opt, rng);
  directrix_properties(s, R, opt);
  optics_properties(s, R, opt, rng);
  return s.results;
}

}  // namespace refl
