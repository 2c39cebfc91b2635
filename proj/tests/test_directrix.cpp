#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "reflector/directrix.hpp"

using namespace refl;

namespace {

class Lens : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { R = new Reflector(build_reflector(oracle::lens(2, 3), 3)); }
  static void TearDownTestSuite() { delete R; }
  static Reflector* R;
};
Reflector* Lens::R = nullptr;

}  // namespace

TEST(Directrix, SphereOfRadiusTwo) {
  const Reflector R = build_reflector(oracle::constant(2, 2, 2.0), 2);
  const DirectrixSurface D = directrix_from_support(R, R.grid_ptr());
  ASSERT_EQ(D.points.size(), R.grid().size());
  for (const Vec3& z : D.points) EXPECT_NEAR(z.norm(), 2.0, 1e-9);
  for (const auto& c : D.support_check) {
    EXPECT_NEAR(c.H, 2.0, 1e-9);
    EXPECT_NEAR(c.p, 2.0, 1e-9);
  }
  EXPECT_NEAR(pedal_residual(R, D), 0.0, 1e-9);
  EXPECT_LE(convexity_violation(R, D), 1e-9);
  for (std::size_t i = 0; i < R.grid().size(); i += 9) {
    const auto zs = directrix_from_map(R, R.grid().point(i));
    ASSERT_EQ(zs.size(), 1u);
    EXPECT_LT((zs[0] - 2.0 * R.grid()[i]).norm(), 1e-9);
    EXPECT_NEAR(directrix_support_identity(R, R.grid().point(i)), 0.0, 1e-9);
  }
  EXPECT_LE(hausdorff_distance(directrix_map_cloud(R), D.points), 5.0 * R.grid().resolution() * R.diameter());
}

TEST(Directrix, ScaledSphere) {
  const Reflector R = build_reflector(oracle::constant(2, 2, 3.0), 2);
  const DirectrixSurface D = directrix_from_support(R, R.grid_ptr());
  for (const Vec3& z : D.points) EXPECT_NEAR(z.norm(), 3.0, 1e-9);
  for (const auto& c : D.support_check) EXPECT_NEAR(c.H - c.p, 0.0, 1e-9);
}

TEST_F(Lens, PoleAndSupportIdentity) {
  const DirectrixSurface D = directrix_from_support(*R, R->grid_ptr());
  const std::size_t top = R->grid().nearest(Vec3::UnitZ());
  EXPECT_LT((D.points[top] - Vec3(0, 0, 1)).norm(), 1e-9);

  const auto zs = directrix_from_map(*R, Direction(0, 0, 1));
  ASSERT_EQ(zs.size(), 1u);
  EXPECT_LT((zs[0] - Vec3(0, 0, 1)).norm(), 1e-9);

  const double bound = 5.0 * R->grid().resolution() * R->diameter();
  // H(e1) = p(-e1) = 2 and H(-e3) = p(e3) = 1.
  EXPECT_NEAR(directrix_support_identity(*R, Direction(-1, 0, 0)), 0.0, 1e-9);
  EXPECT_NEAR(directrix_support_identity(*R, Direction(0, 0, 1)), 0.0, 1e-9);
  for (const auto& c : D.support_check) EXPECT_LE(std::abs(c.H - c.p), bound);
  EXPECT_LE(convexity_violation(*R, D), 1e-6 * R->diameter());
  EXPECT_LE(pedal_residual(*R, D), 1e-9);
}

TEST_F(Lens, EdgePointsLieAtTwiceTheSupport) {
  const Direction x(1, 0, 0);
  const auto zs = directrix_from_map(*R, x);
  EXPECT_GT(zs.size(), 2u);
  for (const Vec3& z : zs) {
    const Vec3 u = z.normalized();
    EXPECT_NEAR(z.norm(), 2.0 * support_function(*R, Direction(u)).h, 1e-6);
  }
  const DirectrixSurface D = directrix_from_support(*R, R->grid_ptr());
  EXPECT_LE(hausdorff_distance(directrix_map_cloud(*R), D.points),
            5.0 * R->grid().resolution() * R->diameter());
}

TEST(Directrix, HausdorffBruteForce) {
  const std::vector<Vec3> a = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
  const std::vector<Vec3> b = {Vec3(0, 0, 0), Vec3(0, 3, 0)};
  EXPECT_NEAR(hausdorff_distance(a, b), 3.0, 1e-15);
  EXPECT_NEAR(hausdorff_distance(a, a), 0.0, 1e-15);
}

TEST(Directrix, SphereTurningAngleTracksResolution) {
  for (int level : {2, 3}) {
    const Reflector R = build_reflector(oracle::constant(2, level, 2.0), level);
    const double angle = max_turning_angle(directrix_from_support(R, R.grid_ptr()));
    EXPECT_GT(angle, 0.5 * R.grid().resolution());
    EXPECT_LT(angle, 2.0 * R.grid().resolution());
  }
}

TEST(Directrix, LensProbesShrink) {
  std::vector<Reflector> rs;
  for (int level : {3, 4}) rs.push_back(build_reflector(oracle::lens(2, level), level));
  std::vector<DirectrixSurface> ds;
  for (const auto& R : rs) ds.push_back(directrix_from_support(R, R.grid_ptr()));
  const LevelProbe turning = smoothness_probe(ds);
  ASSERT_EQ(turning.ratios.size(), 1u);
  EXPECT_LT(turning.ratios[0], 0.7);
  const LevelProbe jumps = gradient_probe({&rs[0], &rs[1]});
  ASSERT_EQ(jumps.ratios.size(), 1u);
  EXPECT_LT(jumps.ratios[0], 0.7);
}

TEST(Directrix, CircleLensProbesShrink) {
  std::vector<Reflector> rs;
  for (int level : {5, 6, 7}) rs.push_back(build_reflector(oracle::lens(1, level), level));
  std::vector<DirectrixSurface> ds;
  for (const auto& R : rs) ds.push_back(directrix_from_support(R, R.grid_ptr()));
  for (double r : smoothness_probe(ds).ratios) EXPECT_LT(r, 0.7);
  for (double r : gradient_probe({&rs[0], &rs[1], &rs[2]}).ratios) EXPECT_LT(r, 0.7);
}

TEST(Directrix, SingleLevelIsInsufficient) {
  const Reflector R = build_reflector(oracle::lens(2, 1), 1);
  try {
    smoothness_probe({directrix_from_support(R, R.grid_ptr())});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientData);
  }
  EXPECT_THROW(gradient_probe({&R}), Error);
}
