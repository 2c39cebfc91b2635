#pragma once

// Brute-force reference computations shared by the tests.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "reflector/reflector.hpp"

namespace oracle {

using refl::Vec3;

inline double angle(const Vec3& a, const Vec3& b) { return std::acos(std::clamp(a.dot(b), -1.0, 1.0)); }

/// Max over points of the angle to the closest other point, over all pairs.
inline double resolution(const refl::SphereGrid& g) {
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double best = 10.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (j != i) best = std::min(best, angle(g[i], g[j]));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

/// Dense direction samples: a fine circle or a Fibonacci sphere.
inline std::vector<Vec3> dense_directions(int dim, int count) {
  std::vector<Vec3> out;
  if (dim == 1) {
    for (int k = 0; k < count; ++k) {
      const double t = 2.0 * M_PI * k / count;
      out.emplace_back(std::cos(t), std::sin(t), 0.0);
    }
    return out;
  }
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / count;
    const double r = std::sqrt(1.0 - z * z);
    out.emplace_back(r * std::cos(golden * k), r * std::sin(golden * k), z);
  }
  return out;
}

/// rho(x) = min over finite entries of p / (1 - <x, y>), straight from the field.
inline double radius(const refl::FocalField& p, const Vec3& x) {
  double best = refl::kInf;
  for (std::size_t j = 0; j < p.grid().size(); ++j) {
    if (!std::isfinite(p[j])) continue;
    const double d = 1.0 - x.dot(p.grid()[j]);
    if (d > 0.0) best = std::min(best, p[j] / d);
  }
  return best;
}

/// sup over dense surface samples of an objective of the surface point.
template <class F>
double surface_max(const refl::FocalField& p, F&& f, int count) {
  double best = -refl::kInf;
  for (const Vec3& x : dense_directions(p.dim(), count)) best = std::max(best, f(radius(p, x) * x));
  return best;
}

inline refl::FocalField lens(int dim, int level) {
  auto g = refl::make_shared_grid(dim, level);
  std::vector<double> v(g->size(), refl::kInf);
  const Vec3 axis = dim == 2 ? Vec3::UnitZ() : Vec3::UnitY();
  v[g->nearest(axis)] = 1.0;
  v[g->nearest(-axis)] = 1.0;
  return refl::FocalField(g, v);
}

inline refl::FocalField constant(int dim, int level, double c) {
  auto g = refl::make_shared_grid(dim, level);
  return refl::FocalField(g, std::vector<double>(g->size(), c));
}

/// 5 to 50 members with parameters in [0.5, 3] on random grid directions.
inline refl::FocalField random_family(refl::GridPtr g, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(5, 50);
  std::uniform_real_distribution<double> param(0.5, 3.0);
  std::uniform_int_distribution<std::size_t> index(0, g->size() - 1);
  std::vector<double> v(g->size(), refl::kInf);
  const int m = count(rng);
  for (int k = 0; k < m; ++k) v[index(rng)] = param(rng);
  return refl::FocalField(g, v);
}

}  // namespace oracle
