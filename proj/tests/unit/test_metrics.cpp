#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "ltpinn/metrics.hpp"
#include "ltpinn/oracle.hpp"

using namespace ltpinn;
using J = ad::Jet<double>;
using Fields = std::vector<J>;

TEST(Metrics, RelativeL2) {
  const std::vector<double> ref = {3.0, 4.0};
  EXPECT_EQ(relative_l2(ref, ref), 0.0);
  EXPECT_DOUBLE_EQ(relative_l2(std::vector<double>{3.0, 5.0}, ref), 1.0 / 5.0);
  EXPECT_DOUBLE_EQ(relative_l2(std::vector<double>{0.0, 0.0}, ref), 1.0);
  EXPECT_THROW(relative_l2(std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 0.0}), UndefinedMetricError);
  EXPECT_THROW(relative_l2(std::vector<double>{1.0}, ref), ConfigError);
  EXPECT_THROW(relative_l2(std::vector<double>{}, std::vector<double>{}), UndefinedMetricError);
}

TEST(Metrics, NormalisedMeanAbsoluteError) {
  const std::vector<double> ref = {0.0, 2.0, 4.0, 1.0};
  EXPECT_EQ(nmae(ref, ref), 0.0);
  EXPECT_DOUBLE_EQ(nmae(std::vector<double>{1.0, 2.0, 4.0, 0.0}, ref), (1.0 + 1.0) / 4.0 / 4.0);
  EXPECT_THROW(nmae(std::vector<double>{1.0, 2.0}, std::vector<double>{3.0, 3.0}), UndefinedMetricError);
}

TEST(Metrics, BoundaryFluxOfClosedForm) {
  const AnnulusProblem p{0.5, 2.0, -0.5, {0.2, -0.15}};
  auto field = [&](const J& x, const J& y) { return Fields{annulus_temperature_expr(p, x, y)}; };
  const auto s = boundary_flux(field, CirclePatch{p.center}, 64);
  ASSERT_EQ(s.size(), 64u);
  for (const auto& f : s) EXPECT_NEAR(f.flux, -0.5, 1e-13);
  EXPECT_NEAR(mean_flux(s), -0.5, 1e-13);
  // T = x: flux cos(angle), zero on average
  auto lin = [](const J& x, const J&) { return Fields{x}; };
  const auto t = boundary_flux(lin, CirclePatch{{1.0, 1.0}}, 8);
  EXPECT_NEAR(t[0].flux, 1.0, 1e-15);
  EXPECT_NEAR(t[2].flux, 0.0, 1e-15);
  EXPECT_NEAR(mean_flux(t), 0.0, 1e-15);
  EXPECT_THROW(boundary_flux(lin, CirclePatch{}, 3), ConfigError);
  EXPECT_THROW(mean_flux(std::vector<FluxSample>{}), UndefinedMetricError);
}

TEST(Metrics, LiftDragOfLinearPressure) {
  const std::vector<CirclePatch> one{{{0.0, 0.0}}};
  // closed integral of x n_x ds over r = 1/2 is pi r^2
  const Force fx = lift_drag([](Vec2 p) { return p.x; }, one, 64);
  EXPECT_NEAR(fx.drag, -std::numbers::pi / 4.0, 1e-13);
  EXPECT_NEAR(fx.lift, 0.0, 1e-13);
  const Force fy = lift_drag([](Vec2 p) { return p.y; }, one, 64);
  EXPECT_NEAR(fy.lift, -std::numbers::pi / 4.0, 1e-13);
  // constant pressure exerts no net force; forces add over patches
  const std::vector<CirclePatch> two{{{0.0, 0.0}}, {{3.0, 1.0}}};
  const Force c = lift_drag([](Vec2) { return 7.0; }, two, 32);
  EXPECT_NEAR(c.drag, 0.0, 1e-13);
  EXPECT_NEAR(c.lift, 0.0, 1e-13);
  EXPECT_NEAR(lift_drag([](Vec2 p) { return p.x; }, two, 64).drag, -std::numbers::pi / 2.0, 1e-12);
  EXPECT_THROW(lift_drag([](Vec2) { return 0.0; }, one, 8), ConfigError);
}

TEST(Metrics, LiftDragConvergesForSmoothPressure) {
  const std::vector<CirclePatch> one{{{0.0, 0.0}}};
  // closed integral of exp(x) n_x ds = 2 pi r I_1(r)
  const double exact = -2.0 * std::numbers::pi * 0.5 * std::cyl_bessel_i(1.0, 0.5);
  const double e16 = std::abs(lift_drag([](Vec2 p) { return std::exp(p.x); }, one, 16).drag - exact);
  const double e256 = std::abs(lift_drag([](Vec2 p) { return std::exp(p.x); }, one, 256).drag - exact);
  EXPECT_LT(e256, 1e-12);
  EXPECT_LE(e256, e16);
}

TEST(Metrics, MetricGridExcludesPatches) {
  const std::vector<CirclePatch> patch{{{0.0, 0.0}}};
  const auto g = metric_grid({-1, 1, -1, 1}, patch, 21);
  for (const Vec2& p : g) EXPECT_GE(signed_distance(patch[0], p), 0.0);
  EXPECT_LT(g.size(), 21u * 21u);
  EXPECT_EQ(metric_grid({-1, 1, -1, 1}, {}, 21).size(), 21u * 21u);
}

TEST(Metrics, JsonRecords) {
  const std::vector<MetricRecord> r = {{"relative_l2", "T", 0.5}, {"gamma_error", "", 0.25}};
  EXPECT_EQ(metrics_json(r, "abc"),
            "[\n  {\"metric\": \"relative_l2\", \"field\": \"T\", \"value\": 0.5, \"config_hash\": \"abc\"},\n"
            "  {\"metric\": \"gamma_error\", \"field\": \"\", \"value\": 0.25, \"config_hash\": \"abc\"}\n]\n");
  EXPECT_EQ(metrics_json({}, "abc"), "[]\n");
}

TEST(Metrics, RelativeL2ScalesWithError) {
  const std::vector<double> ref = {1.0, -2.0, 0.5, 3.0};
  const std::vector<double> err = {0.1, 0.05, -0.2, 0.0};
  std::vector<double> once(ref.size());
  std::vector<double> twice(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    once[i] = ref[i] + err[i];
    twice[i] = ref[i] + 2.0 * err[i];
  }
  EXPECT_NEAR(relative_l2(twice, ref), 2.0 * relative_l2(once, ref), 1e-15);
}
