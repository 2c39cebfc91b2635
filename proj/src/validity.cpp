#include "reflector/validity.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>

#include "reflector/detail/cone.hpp"
#include "reflector/nnls.hpp"
#include "reflector/optics.hpp"

namespace refl {

FocalField closure(const FocalField& p, int level, double tol) {
  const RadialField rho = radial_from_focal(p, make_shared_grid(p.dim(), level), tol);
  return focal_from_radial(rho, p.grid_ptr(), tol);
}

ValidityVerdict is_focal_function(const FocalField& p, double tol) {
  if (!(tol >= 0.0)) throw Error(ErrorKind::InvalidInput, "tol must be nonnegative");
  if (p.finite_count() < 2) {
    throw Error(ErrorKind::InvalidInput, "focal function needs at least two finite values");
  }
  const FocalField star = closure(p, p.grid().level());
  ValidityVerdict out{true, std::nullopt, -kInf};
  std::size_t worst = 0;
  for (std::size_t i = 0; i < p.grid().size(); ++i) {
    if (!std::isfinite(p[i])) continue;
    const double gap = (p[i] - star[i]) / p[i];
    if (gap > out.max_relative_gap) {
      out.max_relative_gap = gap;
      worst = i;
    }
  }
  out.valid = out.max_relative_gap <= tol;
  if (!out.valid) out.witness = Witness{p.grid().point(worst), p[worst], star[worst]};
  return out;
}

std::vector<Direction> supporting_axes(const Reflector& R, const Direction& x, double eps) {
  std::vector<Vec3> axes;
  for (const Direction& y : reflector_map(R, x, eps)) axes.push_back(y.vec());
  std::vector<Vec3> normals;
  for (std::size_t j : active_members(R.family(), x.vec(), eps)) {
    normals.push_back((x.vec() - R.family().axis(j)).normalized());
  }
  for (const Vec3& u : detail::sample_cone(normals, R.grid().resolution())) {
    axes.push_back(reflect_unchecked(x.vec(), u));
  }
  return detail::unique_directions(axes, 1e-9);
}

namespace {

Eigen::MatrixXd columns(const std::vector<Vec3>& v, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd A(3, static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) A.col(static_cast<Eigen::Index>(k)) = v[idx[k]];
  return A;
}

bool independent(const std::vector<Vec3>& v, const std::vector<std::size_t>& idx) {
  if (idx.empty()) return true;
  Eigen::MatrixXd A = columns(v, idx);
  for (Eigen::Index k = 0; k < A.cols(); ++k) A.col(k).normalize();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  return svd.singularValues().minCoeff() > 1e-9;
}

struct Fit {
  std::vector<std::size_t> idx;
  Eigen::VectorXd alpha;
  double residual;
};

Fit fit(const std::vector<Vec3>& v, std::vector<std::size_t> idx, const Vec3& target) {
  const NnlsResult r = nnls(columns(v, idx), target);
  Fit out{{}, {}, r.residual};
  std::vector<double> a;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (r.x[static_cast<Eigen::Index>(k)] > 0.0) {
      out.idx.push_back(idx[k]);
      a.push_back(r.x[static_cast<Eigen::Index>(k)]);
    }
  }
  out.alpha = Eigen::Map<Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
  return out;
}

}  // namespace

Decomposition find_decomposition(const Reflector& R, const Direction& x, const Direction& y, double eps) {
  const Vec3& xv = x.vec();
  const double rho = R.radius(xv);
  const double py = focal_transform(R, y.vec()).value;
  if (py - rho * (1.0 - xv.dot(y.vec())) > eps * py) {
    throw Error(ErrorKind::InvalidInput, "y is not the axis of a paraboloid supporting R at x");
  }
  const Vec3 target = xv - y.vec();

  // Boundary rays of the cone spanned by the vectors x - y_i.
  std::vector<Vec3> axes;
  std::vector<Vec3> dirs;
  for (const Direction& c : supporting_axes(R, x, eps)) {
    const Vec3 v = xv - c.vec();
    if (v.norm() < 1e-12) continue;
    axes.push_back(c.vec());
    dirs.push_back(v.normalized());
  }
  const std::vector<Vec3> rays = detail::extreme_rays(dirs);
  std::vector<Vec3> cand_axes;
  std::vector<Vec3> vecs;
  for (const Vec3& r : rays) {
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      if ((dirs[k] - r).norm() <= 1e-12) {
        cand_axes.push_back(axes[k]);
        vecs.push_back(xv - axes[k]);
        break;
      }
    }
  }

  Decomposition out{x, y, {}, kInf};
  const Vec3 t_dir = target.normalized();
  for (std::size_t k = 0; k < vecs.size(); ++k) {
    if ((vecs[k].normalized() - t_dir).norm() <= 1e-9) {
      const double alpha = target.norm() / vecs[k].norm();
      out.terms.push_back({alpha, Direction(cand_axes[k])});
      out.residual = (target - alpha * vecs[k]).norm();
      return out;
    }
  }
  if (vecs.empty()) throw Error(ErrorKind::DecompositionFailure, "no supporting axes at x");

  std::vector<std::size_t> all(vecs.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  Fit best = fit(vecs, all, target);
  if (best.residual > kDecompositionTol) {
    throw Error(ErrorKind::DecompositionFailure, "x - y is not in the cone of supporting directions");
  }

  // Caratheodory reduction: drop terms while a nonnegative re-fit stays within tolerance.
  const std::size_t max_terms = static_cast<std::size_t>(R.dim()) + 1;
  while (best.idx.size() > max_terms || !independent(vecs, best.idx)) {
    std::vector<std::size_t> order(best.idx.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return best.alpha[static_cast<Eigen::Index>(a)] < best.alpha[static_cast<Eigen::Index>(b)];
    });
    bool reduced = false;
    for (std::size_t drop : order) {
      std::vector<std::size_t> rest;
      for (std::size_t k = 0; k < best.idx.size(); ++k) {
        if (k != drop) rest.push_back(best.idx[k]);
      }
      Fit f = fit(vecs, rest, target);
      if (f.residual <= kDecompositionTol) {
        best = std::move(f);
        reduced = true;
        break;
      }
    }
    if (!reduced) throw Error(ErrorKind::DecompositionFailure, "Caratheodory reduction stalled");
  }

  for (std::size_t k = 0; k < best.idx.size(); ++k) {
    out.terms.push_back({best.alpha[static_cast<Eigen::Index>(k)], Direction(cand_axes[best.idx[k]])});
  }
  out.residual = best.residual;
  return out;
}

namespace {

double focal_value_at(const FocalField& p, const Vec3& y, const Reflector* fallback) {
  const std::size_t i = p.grid().nearest(y);
  if (geodesic_distance(p.grid()[i], y) <= 1e-9 && std::isfinite(p[i])) return p[i];
  if (fallback) return focal_transform(*fallback, y).value;
  throw Error(ErrorKind::NotEvaluable, "focal function is not finite at a required direction");
}

}  // namespace

double check_minkg(const FocalField& p, const Decomposition& d, const Reflector* fallback) {
  double sum = 0.0;
  for (const auto& t : d.terms) sum += t.alpha * focal_value_at(p, t.axis.vec(), fallback);
  return sum - focal_value_at(p, d.y.vec(), fallback);
}

FocalValue extend_focal(const Reflector& R, const Vec3& Y) { return focal_transform(R, Y); }

double check_subadditivity(const Reflector& R, const Vec3& Y1, const Vec3& Y2) {
  return extend_focal(R, Y1).value + extend_focal(R, Y2).value - extend_focal(R, Y1 + Y2).value;
}

RefinedResidual check_refined_inequality(const Reflector& R, const std::vector<RefinedTerm>& terms) {
  if (terms.empty()) throw Error(ErrorKind::InvalidInput, "no terms");
  const bool nonneg = std::all_of(terms.begin(), terms.end(), [](const RefinedTerm& t) { return t.alpha >= 0.0; });
  const bool nonpos = std::all_of(terms.begin(), terms.end(), [](const RefinedTerm& t) { return t.alpha <= 0.0; });
  if (!nonneg && !nonpos) throw Error(ErrorKind::UnsupportedCase, "coefficients of mixed sign");

  Vec3 Y = Vec3::Zero();
  double weighted = 0.0;
  double weighted_norms = 0.0;
  for (const auto& t : terms) {
    Y += t.alpha * t.Y;
    weighted += t.alpha * extend_focal(R, t.Y).value;
    weighted_norms += t.alpha * t.Y.norm();
  }
  const FocalValue pY = extend_focal(R, Y);
  const double rhs = weighted + pY.argmax.norm() * (Y.norm() - weighted_norms);
  return {rhs - pY.value, rhs, !nonneg};
}

double sampled_sublinearity(const FieldCandidate& c, std::uint64_t seed, int pairs) {
  const FocalField& f = c.field;
  auto unit_value = [&](const Vec3& u) {
    return c.evaluate ? c.evaluate(u) : f[f.grid().nearest(u)];
  };
  auto value = [&](const Vec3& Y) {
    const double n = Y.norm();
    return n > 0.0 ? n * unit_value(Y / n) : 0.0;
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const bool planar = f.dim() == 1;
  auto draw = [&] {
    Vec3 v(normal(rng), normal(rng), normal(rng));
    if (planar) v.z() = 0.0;
    return v;
  };
  double worst = kInf;
  for (int k = 0; k < pairs; ++k) {
    const Vec3 a = draw();
    const Vec3 b = draw();
    worst = std::min(worst, value(a) + value(b) - value(a + b));
  }
  return worst;
}

std::optional<SublinearSearchResult> sublinear_but_invalid_search(
    const std::function<FieldCandidate(std::size_t)>& generator, std::size_t budget, double tol,
    std::uint64_t seed) {
  for (std::size_t i = 0; i < budget; ++i) {
    FieldCandidate c = generator(i);
    if (sampled_sublinearity(c, seed + i) < -1e-9) continue;
    ValidityVerdict v = is_focal_function(c.field, tol);
    if (!v.valid) return SublinearSearchResult{i, std::move(c), std::move(v)};
  }
  return std::nullopt;
}

}  // namespace refl
