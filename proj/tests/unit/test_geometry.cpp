#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "ltpinn/geometry.hpp"

using namespace ltpinn;

TEST(Geometry, SignedDistance) {
  EXPECT_EQ(signed_distance(CirclePatch{{0, 0}}, {0.5, 0}), 0.0);
  EXPECT_EQ(signed_distance(CirclePatch{{0, 0}}, {0, 0}), -0.5);
  EXPECT_EQ(signed_distance(CirclePatch{{1, 1}}, {1, 2}), 0.5);
}

TEST(Geometry, DeltaValues) {
  const CirclePatch p{{0, 0}};
  EXPECT_EQ(delta(p, {0.5, 0.0}), 0.5);
  EXPECT_NEAR(delta(p, {1.0, 0.0}), 1.0, 1e-15);
  EXPECT_NEAR(delta(p, {0.4, 0.0}), 1.0 / (1.0 + std::exp(10.0)), 1e-17);
  EXPECT_NEAR(delta_of_sdf(-0.1), 4.5398e-5, 1e-9);
}

TEST(Geometry, DeltaSymmetricAndIncreasing) {
  double prev = -1.0;
  for (double s = -0.3; s <= 0.3; s += 0.01) {
    EXPECT_NEAR(delta_of_sdf(s) + delta_of_sdf(-s), 1.0, 1e-12);
    const double d = delta_of_sdf(s);
    EXPECT_GT(d, prev);
    prev = d;
  }
}

TEST(Geometry, CompositeDelta) {
  const std::vector<CirclePatch> one{{{0, 0}}};
  EXPECT_GT(composite_delta(one, {0.75, 0.0}), 1.0 - 1e-8);
  const std::vector<CirclePatch> two{{{0, 0}}, {{3, 0}}};
  EXPECT_LT(composite_delta(two, {0.0, 0.0}), 1e-15);
  EXPECT_NEAR(composite_delta(one, {0.5, 0.0}, 2.0), 0.25, 1e-15);
  // a far patch barely changes the product
  const std::vector<CirclePatch> far{{{0, 0}}, {{10, 10}}};
  EXPECT_LT(std::abs(composite_delta(far, {0.9, 0.0}) - composite_delta(one, {0.9, 0.0})), 1e-8);
  EXPECT_THROW(composite_delta(std::vector<CirclePatch>{}, {0, 0}), ConfigError);
  EXPECT_THROW(composite_delta(one, {0, 0}, 0.0), ConfigError);
}

TEST(Geometry, BoundaryNormal) {
  const CirclePatch p{{0, 0}};
  const Vec2 a = boundary_normal(p, {0.5, 0.0});
  EXPECT_EQ(a.x, 1.0);
  EXPECT_EQ(a.y, 0.0);
  const Vec2 b = boundary_normal(p, {0.0, -0.3});
  EXPECT_NEAR(b.x, 0.0, 1e-15);
  EXPECT_NEAR(b.y, -1.0, 1e-12);
  for (Vec2 x : {Vec2{0.3, 0.7}, Vec2{-2.0, 0.1}, Vec2{1e-6, -3e-6}})
    EXPECT_NEAR(norm(boundary_normal(CirclePatch{{0.2, -0.1}}, x)), 1.0, 1e-12);
  EXPECT_THROW(boundary_normal(p, {0.0, 0.0}), DegenerateNormalError);
}

TEST(Geometry, SampleRingsCountsAndPositions) {
  const CirclePatch p{{0, 0}};
  const double radii4[] = {0.5, 0.4, 0.3, 0.2};
  EXPECT_EQ(sample_rings(p, 0, radii4, 128).size(), 512u);
  EXPECT_EQ(sample_rings(p, 0, radii4, 256).size(), 1024u);
  const double r[] = {0.5};
  const auto s = sample_rings(p, 0, r, 4);
  ASSERT_EQ(s.size(), 4u);
  const Vec2 expect[] = {{0.5, 0}, {0, 0.5}, {-0.5, 0}, {0, -0.5}};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(s[i].position.x, expect[i].x, 1e-15);
    EXPECT_NEAR(s[i].position.y, expect[i].y, 1e-15);
  }
  const double bad[] = {0.6};
  EXPECT_THROW(sample_rings(p, 0, bad, 4), ConfigError);
  const double zero[] = {0.0};
  EXPECT_THROW(sample_rings(p, 0, zero, 4), ConfigError);
}

TEST(Geometry, RingsTranslateWithGamma) {
  const double radii[] = {0.5, 0.2};
  const auto a = sample_rings(CirclePatch{{0.1, 0.2}}, 0, radii, 7);
  const Vec2 v{0.35, -1.25};
  const auto b = sample_rings(CirclePatch{{0.1 + v.x, 0.2 + v.y}}, 0, radii, 7);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(b[i].position.x - a[i].position.x, v.x, 1e-15);
    EXPECT_NEAR(b[i].position.y - a[i].position.y, v.y, 1e-15);
    const Vec2 moved = a[i].position_for({0.1 + v.x, 0.2 + v.y});
    EXPECT_NEAR(moved.x, b[i].position.x, 1e-15);
    EXPECT_NEAR(moved.y, b[i].position.y, 1e-15);
  }
}

TEST(Geometry, InitGammaInsideRoiAndDeterministic) {
  const Roi roi{-2.0, 3.0, -1.0, 1.0};
  const auto a = init_gamma(50, roi, 7);
  const auto b = init_gamma(50, roi, 7);
  ASSERT_EQ(a.size(), 50u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(a[i] == b[i]);
    EXPECT_GT(a[i].x, roi.x_min);
    EXPECT_LT(a[i].x, roi.x_max);
    EXPECT_GT(a[i].y, roi.y_min);
    EXPECT_LT(a[i].y, roi.y_max);
  }
  const Vec2 mid = gamma_from_raw({0.0, 0.0}, roi);
  EXPECT_EQ(mid.x, 0.5);
  EXPECT_EQ(mid.y, 0.0);
  EXPECT_THROW(init_gamma(0, roi, 1), ConfigError);
}

TEST(Geometry, PairDistance) {
  EXPECT_EQ(patch_pair_distance(CirclePatch{{0, 0}}, CirclePatch{{2.5, 0}}), 2.5);
  EXPECT_EQ(patch_pair_distance(CirclePatch{{1, 1}}, CirclePatch{{1, 1}}), 0.0);
  EXPECT_EQ(patch_pair_distance(CirclePatch{{0, 0}}, CirclePatch{{3, 4}}), 5.0);
}

TEST(Geometry, TopologyJson) {
  const std::vector<CirclePatch> p{{{0.3, -0.2}}};
  EXPECT_EQ(topology_json(p), "[\n  {\"center_x\": 0.29999999999999999, \"center_y\": -0.20000000000000001, "
                              "\"diameter\": 1}\n]\n");
  const std::string svg = topology_svg({-1, 1, -1, 1}, p);
  EXPECT_NE(svg.find("<circle"), std::string::npos);
}
