#pragma once

// Maximization over the reflector surface of objectives that are affine on every face.
//
// On the face cut out by member j we have |X| = p_j + <X, y_j>, so the linear functional
// <X, u> and the focal objective |X||Y| - <X, Y> both restrict to an affine function of X.
// A maximizer is then either a tangency point inside one face, the extremum of a linear
// function along the ellipse shared by two faces, or a vertex shared by three faces
// (two faces in the plane). Grid seeding plus local simplex refinement locate the right
// neighbourhood; the closed-form candidates make the final value exact.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>
#include <numbers>

#include "reflector/reflector.hpp"
#include "reflector/sphere_grid.hpp"

namespace refl::detail {

struct FaceAffine {
  double constant;
  Vec3 slope;
};

struct LinearObjective {
  Vec3 u;
  double operator()(const Vec3& X) const { return X.dot(u); }
  FaceAffine on_face(const Family&, std::size_t) const { return {0.0, u}; }
};

struct FocalObjective {
  Vec3 Y;
  double norm;
  explicit FocalObjective(const Vec3& target) : Y(target), norm(target.norm()) {}
  double operator()(const Vec3& X) const { return X.norm() * norm - X.dot(Y); }
  FaceAffine on_face(const Family& f, std::size_t j) const {
    return {norm * f.param(j), norm * f.axis(j) - Y};
  }
};

struct SurfaceMax {
  double value;
  Vec3 point;
};

/// Tangency point on face a where the outward normal is parallel to c.
inline std::optional<Vec3> tangent_point(const Family& f, std::size_t a, const Vec3& c) {
  const double cn = c.norm();
  if (cn < 1e-14) return std::nullopt;
  const Vec3 u = c / cn;
  const Vec3& y = f.axis(a);
  const double yu = y.dot(u);
  if (!(yu < -1e-14)) return std::nullopt;
  const Vec3 x = (y - 2.0 * yu * u).normalized();
  const double r = f.face_radius(a, x);
  if (!std::isfinite(r)) return std::nullopt;
  return Vec3(r * x);
}

/// Maximizer of <X, c> over the ellipse P_a ∩ P_b.
inline std::optional<Vec3> ellipse_point(const Family& f, std::size_t a, std::size_t b, const Vec3& c) {
  const Vec3 m = f.axis(a) - f.axis(b);
  const double mn = m.norm();
  if (mn < 1e-12) return std::nullopt;
  const Vec3 normal = m / mn;
  const Vec3 base = ((f.param(b) - f.param(a)) / mn) * normal;
  const auto [u1, u2] = tangent_basis<double>(normal);
  Eigen::Matrix<double, 3, 2> U;
  U << u1, u2;
  const Vec3& y = f.axis(a);
  const double p = f.param(a);
  // Surface of P_a as a quadric: X^T (I - y y^T) X - 2 p <X, y> - p^2 = 0.
  const Eigen::Matrix3d M = Eigen::Matrix3d::Identity() - y * y.transpose();
  const Eigen::Matrix2d A = U.transpose() * M * U;
  const Eigen::Vector2d lin = 2.0 * U.transpose() * (M * base) - 2.0 * p * U.transpose() * y;
  const double c0 = base.dot(M * base) - 2.0 * p * base.dot(y) - p * p;
  const Eigen::LLT<Eigen::Matrix2d> llt(A);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Eigen::Vector2d center = -0.5 * llt.solve(lin);
  const double r2 = center.dot(A * center) - c0;
  if (!(r2 > 0.0)) return std::nullopt;
  const Eigen::Vector2d w = U.transpose() * c;
  const Eigen::Vector2d Aw = llt.solve(w);
  const double q = w.dot(Aw);
  if (!(q > 1e-300)) return std::nullopt;
  const Eigen::Vector2d z = center + std::sqrt(r2 / q) * Aw;
  return Vec3(base + U * z);
}

/// The arc of the ellipse P_a ∩ P_b from (about) V to the maximizer of <X, c>, along which
/// <X, c> increases: a ball holding it and the tangent at V pointing along it.
struct RisingArc {
  Vec3 center;
  double radius;
  Vec3 tangent;
};

inline std::optional<RisingArc> rising_arc(const Family& f, std::size_t a, std::size_t b,
                                                             const Vec3& c, const Vec3& V) {
  const Vec3 m = f.axis(a) - f.axis(b);
  const double mn = m.norm();
  if (mn < 1e-12) return std::nullopt;
  const Vec3 normal = m / mn;
  const Vec3 base = ((f.param(b) - f.param(a)) / mn) * normal;
  const auto [u1, u2] = tangent_basis<double>(normal);
  Eigen::Matrix<double, 3, 2> U;
  U << u1, u2;
  const Vec3& y = f.axis(a);
  const double p = f.param(a);
  const Eigen::Matrix3d M = Eigen::Matrix3d::Identity() - y * y.transpose();
  const Eigen::Matrix2d A = U.transpose() * M * U;
  const Eigen::Vector2d lin = 2.0 * U.transpose() * (M * base) - 2.0 * p * U.transpose() * y;
  const double c0 = base.dot(M * base) - 2.0 * p * base.dot(y) - p * p;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(A);
  const Eigen::Vector2d lambda = eig.eigenvalues();
  if (!(lambda.minCoeff() > 1e-300)) return std::nullopt;
  const Eigen::Matrix2d Q = eig.eigenvectors();
  const Eigen::Vector2d center = -0.5 * (Q * ((Q.transpose() * lin).cwiseQuotient(lambda)));
  const double r2 = center.dot(A * center) - c0;
  if (!(r2 > 0.0)) return std::nullopt;
  const Eigen::Vector2d semi = (r2 / lambda.array()).sqrt().matrix();
  // E(t) = base + U (center + Q diag(semi) (cos t, sin t)).
  const Vec3 e0 = U * Q.col(0) * semi(0);
  const Vec3 e1 = U * Q.col(1) * semi(1);
  const Vec3 mid = base + U * center;
  const Vec3 dv = V - mid;
  const double tv = std::atan2(dv.dot(e1) / e1.squaredNorm(), dv.dot(e0) / e0.squaredNorm());
  const double tm = std::atan2(e1.dot(c), e0.dot(c));
  const double half = 0.5 * std::remainder(tm - tv, 2.0 * std::numbers::pi);
  const Vec3 C = mid + std::cos(tv + half) * e0 + std::sin(tv + half) * e1;
  const double R = semi.maxCoeff() * std::abs(half) + 1e-9 * (semi.maxCoeff() + mid.norm());
  const Vec3 t = (half < 0.0 ? -1.0 : 1.0) * (std::cos(tv) * e1 - std::sin(tv) * e0);
  return RisingArc{C, R, t};
}

/// Intersections of the line {<X, m1> = d1, <X, m2> = d2} with the surface of member a.
inline int line_points(const Family& f, std::size_t a, const Vec3& m1, double d1, const Vec3& m2,
                       double d2, std::array<Vec3, 2>& out) {
  Vec3 dir = m1.cross(m2);
  const double dn = dir.norm();
  if (dn < 1e-12) return 0;
  dir /= dn;
  // Point of the line closest to the origin: X0 = c1 m1 + c2 m2 with the Gram system solved.
  const double g11 = m1.squaredNorm(), g12 = m1.dot(m2), g22 = m2.squaredNorm();
  const double det = g11 * g22 - g12 * g12;
  const Vec3 X0 = ((g22 * d1 - g12 * d2) / det) * m1 + ((g11 * d2 - g12 * d1) / det) * m2;
  const Vec3& y = f.axis(a);
  const double dy = dir.dot(y);
  const double s0 = f.param(a) + X0.dot(y);
  const double qa = 1.0 - dy * dy;
  const double qb = 2.0 * (X0.dot(dir) - s0 * dy);
  const double qc = X0.squaredNorm() - s0 * s0;
  if (std::abs(qa) < 1e-14) {
    if (std::abs(qb) < 1e-300) return 0;
    out[0] = X0 - (qc / qb) * dir;
    return 1;
  }
  double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) {
    if (disc < -1e-12 * (qb * qb + std::abs(4.0 * qa * qc))) return 0;
    disc = 0.0;
  }
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (qb + std::copysign(sq, qb));
  const double t1 = q / qa;
  const double t2 = std::abs(q) > 1e-300 ? qc / q : t1;
  out[0] = X0 + t1 * dir;
  out[1] = X0 + t2 * dir;
  return 2;
}

/// Members likely to carry the maximizer near `hint`: the minimizing member on small rings
/// around the hint (members that merely touch the body never win there), then the members
/// with the smallest polar radius at the hint.
inline std::vector<std::size_t> nearby_faces(const Family& fam, const Vec3& hint, double spacing) {
  const int dim = fam.dim();
  const std::size_t nearest = std::min<std::size_t>(fam.size(), dim == 1 ? 4 : 5);
  const std::size_t ring_cap = dim == 1 ? 4 : 6;
  std::vector<std::size_t> out;
  auto add = [&](std::size_t j) {
    if (std::find(out.begin(), out.end(), j) == out.end()) out.push_back(j);
  };
  add(fam.radius_and_face(hint).second);
  const auto [t1, t2] = tangent_basis<double>(hint);
  const int angles = dim == 1 ? 2 : 8;
  for (double r = 1e-6; r < spacing && out.size() < ring_cap; r *= 8.0) {
    for (int k = 0; k < angles; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / angles;
      const Vec3 t = dim == 1 ? Vec3((k == 0 ? 1.0 : -1.0) * circle_tangent<double>(hint))
                              : Vec3(std::cos(phi) * t1 + std::sin(phi) * t2);
      add(fam.radius_and_face(geodesic_step<double>(hint, t, r)).second);
    }
  }
  std::vector<std::pair<double, std::size_t>> order(fam.size());
  for (std::size_t j = 0; j < fam.size(); ++j) order[j] = {fam.face_radius(j, hint), j};
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(nearest), order.end());
  for (std::size_t k = 0; k < nearest; ++k) add(order[k].second);
  return out;
}

/// Members minimal on tiny rings around x: the faces that meet at the surface point.
inline std::vector<std::size_t> faces_at(const Family& fam, const Vec3& x) {
  std::vector<std::size_t> out;
  auto add = [&](std::size_t j) {
    if (std::find(out.begin(), out.end(), j) == out.end()) out.push_back(j);
  };
  add(fam.radius_and_face(x).second);
  const auto [t1, t2] = tangent_basis<double>(x);
  const int angles = fam.dim() == 1 ? 2 : 12;
  for (double r : {1e-7, 1e-5}) {
    for (int k = 0; k < angles; ++k) {
      const double phi = 2.0 * std::numbers::pi * k / angles;
      const Vec3 t = fam.dim() == 1 ? Vec3((k == 0 ? 1.0 : -1.0) * circle_tangent<double>(x))
                                    : Vec3(std::cos(phi) * t1 + std::sin(phi) * t2);
      add(fam.radius_and_face(geodesic_step<double>(x, t, r)).second);
    }
  }
  return out;
}

/// Candidates one step along the skeleton from the faces meeting at a point. Inside a single face
/// these are the extrema along its edges with every other member; on an edge or vertex, the
/// extremum along each edge there and the vertices where other members cut it.
template <class Obj>
std::vector<Vec3> skeleton_step(const Family& fam, const std::vector<std::size_t>& faces, const Obj& obj,
                                const Vec3& at) {
  std::vector<Vec3> out;
  std::array<Vec3, 2> pts;
  if (faces.size() == 1 || fam.dim() == 1) {
    for (std::size_t a : faces) {
      const FaceAffine fa = obj.on_face(fam, a);
      if (auto X = tangent_point(fam, a, fa.slope)) out.push_back(*X);
      for (std::size_t j = 0; j < fam.size(); ++j) {
        if (j == a) continue;
        if (fam.dim() == 1) {
          const int k = line_points(fam, a, fam.axis(a) - fam.axis(j), fam.param(j) - fam.param(a), Vec3::UnitZ(), 0.0, pts);
          out.insert(out.end(), pts.begin(), pts.begin() + k);
        } else if (auto X = ellipse_point(fam, a, j, fa.slope)) {
          out.push_back(*X);
        }
      }
    }
    return out;
  }
  for (std::size_t ia = 0; ia < faces.size(); ++ia) {
    const std::size_t a = faces[ia];
    const FaceAffine fa = obj.on_face(fam, a);
    for (std::size_t ib = ia + 1; ib < faces.size(); ++ib) {
      const std::size_t b = faces[ib];
      const auto arc = rising_arc(fam, a, b, fa.slope, at);
      // Member j cuts the surface of a where (p_j - p_a) - <X, y_a - y_j> < 0. When the edge
      // rises only into a face that cuts it at `at`, it holds nothing better.
      if (arc && std::any_of(faces.begin(), faces.end(), [&](std::size_t f) {
            const Vec3 mf = fam.axis(a) - fam.axis(f);
            return arc->tangent.dot(mf) > 1e-9 * arc->tangent.norm() * mf.norm();
          })) {
        continue;
      }
      if (auto X = ellipse_point(fam, a, b, fa.slope)) out.push_back(*X);
      const Vec3 m1 = fam.axis(a) - fam.axis(b);
      const double d1 = fam.param(b) - fam.param(a);
      for (std::size_t j = 0; j < fam.size(); ++j) {
        if (j == a || j == b) continue;
        if (arc) {
          const Vec3 mj = fam.axis(a) - fam.axis(j);
          if (fam.param(j) - fam.param(a) - arc->center.dot(mj) > arc->radius * mj.norm()) continue;
        }
        const int k = line_points(fam, a, m1, d1, fam.axis(a) - fam.axis(j), fam.param(j) - fam.param(a), pts);
        out.insert(out.end(), pts.begin(), pts.begin() + k);
      }
    }
  }
  return out;
}

/// Face combinations already expanded during one maximization.
class SeenFaces {
 public:
  void clear() { keys_.clear(); }
  /// True the first time a (sorted) combination is offered.
  bool insert(std::size_t a, std::size_t b = kNone, std::size_t c = kNone) {
    std::array<std::size_t, 3> k{a, b, c};
    std::sort(k.begin(), k.end());
    const std::uint64_t key = (static_cast<std::uint64_t>(k[0]) << 42) ^ (static_cast<std::uint64_t>(k[1]) << 21) ^
                              static_cast<std::uint64_t>(k[2]);
    auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it != keys_.end() && *it == key) return false;
    keys_.insert(it, key);
    return true;
  }

 private:
  static constexpr std::size_t kNone = (std::size_t{1} << 21) - 1;
  std::vector<std::uint64_t> keys_;
};

/// Closed-form candidate maximizers from faces, edges and vertices of the given members.
/// Combinations already in `seen` are skipped.
template <class Obj>
std::vector<Vec3> face_candidates(const Family& fam, const std::vector<std::size_t>& faces, const Obj& obj,
                                  SeenFaces* seen = nullptr) {
  const int dim = fam.dim();
  const std::size_t K = faces.size();
  auto fresh = [&](auto... idx) { return seen == nullptr || seen->insert(idx...); };
  std::vector<Vec3> out;
  std::array<Vec3, 2> pts;
  for (std::size_t ia = 0; ia < K; ++ia) {
    const std::size_t a = faces[ia];
    const FaceAffine fa = obj.on_face(fam, a);
    if (fresh(a)) {
      if (auto X = tangent_point(fam, a, fa.slope)) out.push_back(*X);
    }
    for (std::size_t ib = ia + 1; ib < K; ++ib) {
      const std::size_t b = faces[ib];
      const Vec3 m1 = fam.axis(a) - fam.axis(b);
      const double d1 = fam.param(b) - fam.param(a);
      if (dim == 1) {
        if (!fresh(a, b)) continue;
        const int k = line_points(fam, a, m1, d1, Vec3::UnitZ(), 0.0, pts);
        out.insert(out.end(), pts.begin(), pts.begin() + k);
        continue;
      }
      if (fresh(a, b)) {
        if (auto X = ellipse_point(fam, a, b, fa.slope)) out.push_back(*X);
      }
      for (std::size_t ic = ib + 1; ic < K; ++ic) {
        const std::size_t c = faces[ic];
        if (!fresh(a, b, c)) continue;
        const int k = line_points(fam, a, m1, d1, fam.axis(a) - fam.axis(c),
                                  fam.param(c) - fam.param(a), pts);
        out.insert(out.end(), pts.begin(), pts.begin() + k);
      }
    }
  }
  return out;
}

/// Evaluates the objective on the true surface point in direction X / |X|.
template <class Obj>
std::optional<SurfaceMax> evaluate_direction(const Family& fam, Vec3 X, const Obj& obj) {
  if (fam.dim() == 1) X.z() = 0.0;
  const double n = X.norm();
  if (!(n > 1e-300) || !std::isfinite(n)) return std::nullopt;
  const Vec3 x = X / n;
  const double r = fam.radius(x);
  if (!std::isfinite(r)) return std::nullopt;
  const Vec3 P = r * x;
  return SurfaceMax{obj(P), P};
}

/// evaluate_direction, skipped when X itself does not beat `bound`. Along a ray the objectives
/// grow with the radius wherever they are positive, and X lies on or outside the surface.
template <class Obj>
std::optional<SurfaceMax> evaluate_above(const Family& fam, Vec3 X, const Obj& obj, double bound) {
  if (fam.dim() == 1) X.z() = 0.0;
  if (bound > 0.0 && obj(X) <= bound) return std::nullopt;
  return evaluate_direction(fam, X, obj);
}

/// The surface point at X when no member passes clearly inside X, otherwise nothing. Members are
/// tried in the given order, so that likely cutters come first.
template <class Obj>
std::optional<SurfaceMax> evaluate_skeleton_point(const Family& fam, Vec3 X, const Obj& obj, double bound,
                                                  std::span<const std::size_t> order) {
  if (fam.dim() == 1) X.z() = 0.0;
  if (obj(X) <= bound) return std::nullopt;
  const double n = X.norm();
  if (!(n > 1e-300) || !std::isfinite(n)) return std::nullopt;
  const Vec3 x = X / n;
  const double cut = n * (1.0 - 1e-9);
  double r = kInf;
  for (std::size_t j : order) {
    const double rj = fam.face_radius(j, x);
    if (rj < cut) return std::nullopt;
    r = std::min(r, rj);
  }
  if (!std::isfinite(r)) return std::nullopt;
  return SurfaceMax{obj(r * x), r * x};
}

/// A family restricted to a cap, with the full family as fallback outside it.
struct CappedFamily {
  const Family& full;
  const Family& local;
  Vec3 center;
  double angle;

  const Family& around(const Vec3& x) const {
    return geodesic_distance(center, x.normalized()) < angle * (1.0 - 1e-9) ? local : full;
  }
};

inline CappedFamily capped_at(const RadialField& rho, std::size_t i) {
  return {*rho.family, rho.local[i], (*rho.grid)[i], rho.local_angle};
}

template <class Obj>
SurfaceMax polish(const CappedFamily& fam, const Obj& obj, SurfaceMax best, double spacing) {
  auto consider = [&](const std::vector<Vec3>& candidates) {
    bool improved = false;
    for (const Vec3& X : candidates) {
      const auto cand = evaluate_above(fam.around(X), X, obj, best.value);
      if (cand && cand->value > best.value) {
        best = *cand;
        improved = true;
      }
    }
    return improved;
  };
  for (int round = 0; round < 3; ++round) {
    const Vec3 hint = best.point.normalized();
    const Family& near = fam.around(hint);
    if (!consider(face_candidates(near, nearby_faces(near, hint, spacing), obj))) break;
  }
  // Walk the skeleton: from the faces at the current point to the neighbouring edges and
  // vertices, which may belong to faces too small to show up on the grid.
  const Family& full = fam.full;
  std::vector<std::size_t> order(full.size());
  std::vector<double> radius(full.size());
  for (int round = 0; round < 16; ++round) {
    const Vec3 at = best.point.normalized();
    for (std::size_t j = 0; j < full.size(); ++j) radius[j] = full.face_radius(j, at);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto head = order.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(32, order.size()));
    std::partial_sort(order.begin(), head, order.end(), [&](std::size_t a, std::size_t b) { return radius[a] < radius[b]; });
    bool improved = false;
    for (const Vec3& X : skeleton_step(full, faces_at(full, at), obj, best.point)) {
      // Touching members reproduce the current vertex; only clear gains are worth a full check.
      const double gain = 1e-12 * std::max(1.0, std::abs(best.value));
      const auto cand = evaluate_skeleton_point(full, X, obj, best.value + gain, order);
      if (cand && cand->value > best.value) {
        best = *cand;
        improved = true;
      }
    }
    if (!improved) break;
  }
  return best;
}

/// Faces seen at grid point i and its neighbours.
inline void grid_faces(const SphereGrid& grid, std::span<const std::size_t> face, std::size_t i,
                       std::vector<std::size_t>& out) {
  auto add = [&](std::size_t j) {
    if (std::find(out.begin(), out.end(), j) == out.end()) out.push_back(j);
  };
  add(face[i]);
  for (std::size_t k : grid.neighbors(i)) add(face[k]);
}

/// Per-thread scratch for grid scans: values plus an epoch stamp marking scanned points.
struct ScanBuffers {
  std::vector<double> value;
  std::vector<std::uint32_t> stamp;
  std::vector<std::size_t> scan;
  std::uint32_t epoch = 0;

  void reset(std::size_t n) {
    if (value.size() != n) {
      value.assign(n, 0.0);
      stamp.assign(n, 0);
      epoch = 0;
    }
    if (++epoch == 0) {
      std::fill(stamp.begin(), stamp.end(), 0);
      epoch = 1;
    }
    scan.clear();
  }
  bool marked(std::size_t i) const { return stamp[i] == epoch; }
  void mark(std::size_t i) {
    if (!marked(i)) {
      stamp[i] = epoch;
      scan.push_back(i);
    }
  }
};

inline ScanBuffers& scan_buffers() {
  thread_local ScanBuffers buffers;
  return buffers;
}

/// Grid points whose value is within twice the largest neighbour jump of the best value
/// (at most `limit`, best first), among the points in `scan`.
inline std::vector<std::size_t> near_max(const SphereGrid& grid, std::span<const std::size_t> scan,
                                         const ScanBuffers& buf, std::size_t limit) {
  double jump = 0.0;
  double vmax = -kInf;
  for (std::size_t i : scan) {
    vmax = std::max(vmax, buf.value[i]);
    for (std::size_t j : grid.neighbors(i)) {
      if (buf.marked(j)) jump = std::max(jump, std::abs(buf.value[j] - buf.value[i]));
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i : scan) {
    if (buf.value[i] >= vmax - 2.0 * jump) out.push_back(i);
  }
  std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
    return buf.value[a] > buf.value[b] || (buf.value[a] == buf.value[b] && a < b);
  });
  if (out.size() > limit) out.resize(limit);
  return out;
}

/// Maximum of an objective that is affine on every face, over the surface of rho's family.
///
/// Grid points within twice the largest neighbour jump of the grid maximum are hints (on fine
/// grids only the neighbourhoods of the coarse-grid hints are scanned). Each hint contributes
/// the closed-form candidates of the faces around it, the best `max_seeds` hints are sharpened
/// by the simplex search, and the winner is polished. The result is always the objective at
/// a true surface point.
template <class Obj>
SurfaceMax maximize_on_surface(const RadialField& rho, const Obj& obj, int max_seeds, double tol) {
  const Family& fam = *rho.family;
  const SphereGrid& grid = *rho.grid;
  ScanBuffers& buf = scan_buffers();

  if (rho.coarse) {
    const CoarseIndex& c = *rho.coarse;
    buf.reset(c.grid->size());
    for (std::size_t k = 0; k < c.grid->size(); ++k) {
      buf.value[k] = obj(c.values[k] * (*c.grid)[k]);
      buf.mark(k);
    }
    const std::vector<std::size_t> coarse_hints = near_max(*c.grid, buf.scan, buf, 24);
    buf.reset(grid.size());
    for (std::size_t k : coarse_hints) {
      for (std::uint32_t i : c.cover[k]) buf.mark(i);
    }
  } else {
    buf.reset(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) buf.mark(i);
  }
  for (std::size_t i : buf.scan) buf.value[i] = obj(rho.values[i] * grid[i]);
  const std::vector<std::size_t> hints = near_max(grid, buf.scan, buf, 48);

  std::size_t anchor = hints.front();
  SurfaceMax best{buf.value[anchor], rho.values[anchor] * grid[anchor]};
  auto consider = [&](const std::optional<SurfaceMax>& cand, std::size_t hint) {
    if (cand && cand->value > best.value) {
      best = *cand;
      anchor = hint;
    }
  };
  std::vector<std::size_t> faces;
  thread_local SeenFaces seen;
  seen.clear();
  for (std::size_t h : hints) {
    const CappedFamily capped = capped_at(rho, h);
    faces.clear();
    grid_faces(grid, rho.face, h, faces);
    for (const Vec3& X : face_candidates(fam, faces, obj, &seen)) consider(evaluate_above(capped.around(X), X, obj, best.value), h);
  }

  const std::size_t seeds = std::min(hints.size(), static_cast<std::size_t>(std::max(max_seeds, 0)));
  for (std::size_t s = 0; s < seeds; ++s) {
    const CappedFamily capped = capped_at(rho, hints[s]);
    auto f = [&](const Vec3& x) { return obj(capped.local.radius(x) * x); };
    const Direction refined = refine_direction(grid, hints[s], f, Extremum::Maximize, tol);
    consider(evaluate_direction(capped.around(refined.vec()), refined.vec(), obj), hints[s]);
  }

  return polish(capped_at(rho, anchor), obj, best, grid.resolution());
}

}  // namespace refl::detail
