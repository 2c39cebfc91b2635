#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "reflector/reflector.hpp"

namespace refl {

struct DecompositionTerm {
  double alpha;
  Direction axis;
};

/// x - y = sum alpha_i (x - y_i) with alpha_i >= 0 and independent x - y_i.
struct Decomposition {
  Direction x;
  Direction y;
  std::vector<DecompositionTerm> terms;
  double residual;
};

struct Witness {
  Direction y;
  double p;
  double closure;
};

struct ValidityVerdict {
  bool valid;
  std::optional<Witness> witness;
  double max_relative_gap;
};

inline constexpr double kDecompositionTol = 1e-7;

/// p* = focal_from_radial(radial_from_focal(p)) on p's grid, radial samples at `level`.
FocalField closure(const FocalField& p, int level, double tol = kRefineTol);

/// valid iff max over finite entries of (p - p*) / p <= tol. The witness is the worst entry.
ValidityVerdict is_focal_function(const FocalField& p, double tol);

/// reflector_map(R, x, eps) plus a grid-resolution sampling of the reflected normal cone.
std::vector<Direction> supporting_axes(const Reflector& R, const Direction& x, double eps = kMapEpsilon);

/// Nonnegative decomposition of x - y over at most n + 1 supporting axes at x.
Decomposition find_decomposition(const Reflector& R, const Direction& x, const Direction& y,
                                 double eps = kMapEpsilon);

/// sum alpha_i p(y_i) - p(y). Directions on p's grid with finite p use the sample; others
/// use `fallback`'s focal transform when given.
double check_minkg(const FocalField& p, const Decomposition& d, const Reflector* fallback = nullptr);

/// p(Y) = sup over the body of |X||Y| - <X, Y>; Y = 0 gives (0, origin).
FocalValue extend_focal(const Reflector& R, const Vec3& Y);

/// p(Y1) + p(Y2) - p(Y1 + Y2).
double check_subadditivity(const Reflector& R, const Vec3& Y1, const Vec3& Y2);

struct RefinedTerm {
  double alpha;
  Vec3 Y;
};

struct RefinedResidual {
  double residual;  // rhs - p(Y)
  double rhs;       // sum alpha_i p(Y_i) + |X| (|Y| - sum alpha_i |Y_i|)
  bool reverse;     // all alpha_i <= 0: the inequality flips
};

/// Both sides of the refined subadditivity inequality at Y = sum alpha_i Y_i, with X the
/// contact point of the supporting paraboloid with axis Y. Mixed signs are rejected.
RefinedResidual check_refined_inequality(const Reflector& R, const std::vector<RefinedTerm>& terms);

struct FieldCandidate {
  FocalField field;
  /// Continuous values on the sphere; if empty the nearest grid sample is used.
  std::function<double(const Vec3&)> evaluate;
};

struct SublinearSearchResult {
  std::size_t index;
  FieldCandidate candidate;
  ValidityVerdict verdict;
};

/// Homogeneous extension |Y| p(Y / |Y|) tested on `pairs` random pairs; returns the worst residual.
double sampled_sublinearity(const FieldCandidate& c, std::uint64_t seed, int pairs = 10000);

/// First candidate (lowest index) whose extension is sampled-sublinear but which fails
/// is_focal_function(tol).
std::optional<SublinearSearchResult> sublinear_but_invalid_search(
    const std::function<FieldCandidate(std::size_t)>& generator, std::size_t budget, double tol,
    std::uint64_t seed);

}  // namespace refl
