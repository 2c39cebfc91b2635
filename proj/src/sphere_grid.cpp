#include "reflector/sphere_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <tuple>
#include <unordered_map>

namespace refl {

namespace {

using Key = std::tuple<long long, long long, long long>;

Key quantize(const Vec3& v) {
  constexpr double scale = 1e9;
  return {std::llround(v.x() * scale), std::llround(v.y() * scale), std::llround(v.z() * scale)};
}

std::vector<Direction> circle_points(int level) {
  const std::size_t count = std::size_t{1} << (level + 3);
  std::vector<Direction> pts;
  pts.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
    pts.push_back(Direction::from_unit(Vec3(std::cos(angle), std::sin(angle), 0.0)));
  }
  return pts;
}

void icosphere(int level, std::vector<Direction>& pts, std::vector<SphereGrid::Face>& faces) {
  const double phi = std::numbers::phi;
  const double raw[12][3] = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
                             {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
                             {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  std::vector<Vec3> v;
  for (const auto& r : raw) v.push_back(Vec3(r[0], r[1], r[2]).normalized());
  faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
           {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
           {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
           {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int l = 0; l < level; ++l) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> midpoint;
    auto mid = [&](std::size_t a, std::size_t b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      midpoint.emplace(key, v.size() - 1);
      return v.size() - 1;
    };
    std::vector<SphereGrid::Face> next;
    next.reserve(faces.size() * 4);
    for (const auto& [a, b, c] : faces) {
      const std::size_t ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
      next.push_back({a, ab, ca});
      next.push_back({b, bc, ab});
      next.push_back({c, ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }
  pts.clear();
  pts.reserve(v.size());
  for (const auto& p : v) pts.push_back(Direction::from_unit(p));
}

}  // namespace

SphereGrid::SphereGrid(int dim, int level, std::vector<Direction> points, std::vector<Face> faces)
    : dim_(dim), level_(level), points_(std::move(points)), faces_(std::move(faces)) {
  const std::size_t n = points_.size();

  // Antipodal map via quantized coordinates; the constructions above are exactly symmetric
  // up to rounding, so a hash lookup suffices.
  std::unordered_map<long long, std::vector<std::size_t>> buckets;
  auto hash = [](const Key& k) {
    return std::get<0>(k) * 1000003LL ^ std::get<1>(k) * 10007LL ^ std::get<2>(k);
  };
  for (std::size_t i = 0; i < n; ++i) buckets[hash(quantize(points_[i].vec()))].push_back(i);
  antipode_.assign(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 target = -points_[i].vec();
    for (std::size_t j : buckets[hash(quantize(target))]) {
      if ((points_[j].vec() - target).norm() <= 1e-12) antipode_[i] = j;
    }
    if (antipode_[i] == n) {
      // Fall back to brute force if rounding pushed the antipode into a neighbouring bucket.
      antipode_[i] = nearest(target);
      if ((points_[antipode_[i]].vec() - target).norm() > 1e-12) {
        throw Error(ErrorKind::InvalidInput, "grid is not antipodally symmetric");
      }
    }
  }

  std::vector<std::vector<std::size_t>> adj(n);
  auto link = [&](std::size_t a, std::size_t b) {
    if (std::find(adj[a].begin(), adj[a].end(), b) == adj[a].end()) adj[a].push_back(b);
    if (std::find(adj[b].begin(), adj[b].end(), a) == adj[b].end()) adj[b].push_back(a);
  };
  if (dim_ == 1) {
    for (std::size_t i = 0; i < n; ++i) link(i, (i + 1) % n);
  } else {
    for (const auto& [a, b, c] : faces_) {
      link(a, b);
      link(b, c);
      link(c, a);
    }
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adj[i].begin(), adj[i].end());
    offsets_[i + 1] = offsets_[i] + adj[i].size();
  }
  adjacency_.reserve(offsets_[n]);
  for (const auto& list : adj) adjacency_.insert(adjacency_.end(), list.begin(), list.end());

  for (std::size_t i = 0; i < n; ++i) {
    double closest = std::numeric_limits<double>::infinity();
    for (std::size_t j : neighbors(i)) {
      closest = std::min(closest, geodesic_distance(points_[i].vec(), points_[j].vec()));
    }
    resolution_ = std::max(resolution_, closest);
  }
}

std::vector<std::pair<std::size_t, std::size_t>> SphereGrid::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j : neighbors(i)) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

std::size_t SphereGrid::nearest(const Vec3& x) const {
  std::size_t best = 0;
  double best_dot = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double d = points_[i].vec().dot(x);
    if (d > best_dot) {
      best_dot = d;
      best = i;
    }
  }
  return best;
}

SphereGrid make_grid(int dim, int level) {
  if (dim != 1 && dim != 2) throw Error(ErrorKind::UnsupportedDimension, "dim must be 1 or 2");
  if (level < 0) throw Error(ErrorKind::InvalidInput, "level must be non-negative");
  if (dim == 1) {
    if (level > 24) throw Error(ErrorKind::InvalidInput, "circle level too large");
    return SphereGrid(1, level, circle_points(level), {});
  }
  if (level > 8) throw Error(ErrorKind::InvalidInput, "icosphere level too large");
  std::vector<Direction> pts;
  std::vector<SphereGrid::Face> faces;
  icosphere(level, pts, faces);
  return SphereGrid(2, level, std::move(pts), std::move(faces));
}

GridPtr make_shared_grid(int dim, int level) {
  return std::make_shared<const SphereGrid>(make_grid(dim, level));
}

}  // namespace refl
