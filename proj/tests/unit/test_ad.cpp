#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "ltpinn/ad.hpp"
#include "ltpinn/geometry.hpp"

using namespace ltpinn;
using ad::Jet;
using ad::Seed;
using ad::SeedKind;
using ad::Tape;
using ad::Var;

namespace {

using JV = Jet<Var>;
using Inputs = std::span<const JV>;

double central(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace

TEST(Ad, SquareValueFirstAndSecond) {
  const Seed s[] = {{3.0, SeedKind::SpatialX}};
  const auto d = ad::eval_with_derivatives([](Inputs v) { return v[0] * v[0]; }, std::span<const Seed>(s));
  EXPECT_EQ(d.value, 9.0);
  EXPECT_EQ(d.first[0], 6.0);
  EXPECT_EQ(d.dxx, 2.0);
}

TEST(Ad, TanhAtZero) {
  const Seed s[] = {{0.0, SeedKind::SpatialX}};
  const auto d = ad::eval_with_derivatives([](Inputs v) { return ad::tanh(v[0]); }, std::span<const Seed>(s));
  EXPECT_EQ(d.value, 0.0);
  EXPECT_EQ(d.first[0], 1.0);
  EXPECT_EQ(d.dxx, 0.0);
}

TEST(Ad, SigmoidOfProductMatchesCentralDifferences) {
  const Seed s[] = {{0.7, SeedKind::Parameter}, {-1.3, SeedKind::Parameter}};
  const auto d =
      ad::eval_with_derivatives([](Inputs v) { return ad::sigmoid(v[0] * v[1]); }, std::span<const Seed>(s));
  const double h = 1e-5;
  const double fx = central([](double x) { return ad::sigmoid(x * -1.3); }, 0.7, h);
  const double fy = central([](double y) { return ad::sigmoid(0.7 * y); }, -1.3, h);
  EXPECT_LT(std::abs(d.first[0] - fx) / std::abs(fx), 1e-6);
  EXPECT_LT(std::abs(d.first[1] - fy) / std::abs(fy), 1e-6);
}

TEST(Ad, ConstantExpressionHasZeroDerivativeAndZeroFdError) {
  const double at[] = {0.3, -0.2};
  auto expr = [](auto v) {
    using T = std::remove_cvref_t<decltype(v[0])>;
    return T(2.5);
  };
  const Seed s[] = {{0.3, SeedKind::Parameter}, {-0.2, SeedKind::Parameter}};
  const auto d = ad::eval_with_derivatives(expr, std::span<const Seed>(s));
  EXPECT_EQ(d.first[0], 0.0);
  EXPECT_EQ(d.first[1], 0.0);
  EXPECT_EQ(ad::check_against_finite_differences(expr, std::span<const double>(at), 1e-5), 0.0);
}

TEST(Ad, ExpFiniteDifferenceErrorIsSecondOrderInStep) {
  const double at[] = {1.0};
  auto expr = [](auto v) { return ad::exp(v[0]); };
  const double e1 = ad::check_against_finite_differences(expr, std::span<const double>(at), 1e-3);
  const double e2 = ad::check_against_finite_differences(expr, std::span<const double>(at), 2e-3);
  // central differences on exp: relative error h^2 / 6 + O(h^4)
  EXPECT_NEAR(e1, 1e-6 / 6.0, 1e-8);
  EXPECT_NEAR(e2 / e1, 4.0, 0.05);
}

TEST(Ad, DomainErrorsNamePrimitive) {
  Tape tape;
  const Var zero = Var::leaf(tape, 0.0);
  const Var neg = Var::leaf(tape, -1.0);
  try {
    (void)ad::log(zero);
    FAIL();
  } catch (const ad::DomainError& e) {
    EXPECT_EQ(e.primitive(), "ln");
    EXPECT_EQ(e.operand(), 0.0);
  }
  try {
    (void)ad::sqrt(neg);
    FAIL();
  } catch (const ad::DomainError& e) {
    EXPECT_EQ(e.primitive(), "sqrt");
    EXPECT_EQ(e.operand(), -1.0);
  }
  EXPECT_THROW((void)(Var(1.0) / zero), ad::DomainError);
  EXPECT_THROW((void)ad::log(Jet<double>(-2.0)), ad::DomainError);
}

TEST(Ad, LinearityOfFirstDerivative) {
  const Seed s[] = {{0.4, SeedKind::Parameter}};
  auto f = [](Inputs v) { return ad::tanh(v[0]); };
  auto g = [](Inputs v) { return ad::exp(v[0] * 0.5); };
  const auto df = ad::eval_with_derivatives(f, std::span<const Seed>(s));
  const auto dg = ad::eval_with_derivatives(g, std::span<const Seed>(s));
  const auto dh = ad::eval_with_derivatives([&](Inputs v) { return f(v) * 3.0 - g(v) * 2.0; },
                                            std::span<const Seed>(s));
  EXPECT_NEAR(dh.first[0], 3.0 * df.first[0] - 2.0 * dg.first[0], 1e-15);
}

TEST(Ad, MixedSecondPartialMatchesDifferenceOfGradients) {
  auto f = [](const auto& x, const auto& y) { return ad::exp(x * y) * ad::tanh(x + y * 2.0); };
  const double x0 = 0.3;
  const double y0 = -0.4;
  const auto j = f(Jet<double>::variable_x(x0), Jet<double>::variable_y(y0));
  const double h = 1e-4;
  auto fx = [&](double y) {
    const auto jj = f(Jet<double>::variable_x(x0), Jet<double>(y));
    return jj.dx;
  };
  auto fy = [&](double x) {
    const auto jj = f(Jet<double>(x), Jet<double>::variable_y(y0));
    return jj.dy;
  };
  const double dxy_a = central(fx, y0, h);
  const double dyx_a = central(fy, x0, h);
  EXPECT_NEAR(j.dxy, dxy_a, 1e-7);
  EXPECT_NEAR(j.dxy, dyx_a, 1e-7);
}

TEST(Ad, HarmonicPolynomialsHaveZeroLaplacian) {
  auto check = [](auto poly) {
    for (double x : {-0.9, 0.1, 0.7})
      for (double y : {-0.5, 0.3, 1.1}) {
        const auto j = poly(Jet<double>::variable_x(x), Jet<double>::variable_y(y));
        EXPECT_LT(std::abs(j.dxx + j.dyy), 1e-10);
      }
  };
  check([](const auto& x, const auto& y) { return x * x - y * y; });
  check([](const auto& x, const auto& y) { return x * x * x - 3.0 * x * y * y; });
  check([](const auto& x, const auto& y) { return x * x * x * x - 6.0 * x * x * y * y + y * y * y * y; });
  check([](const auto& x, const auto& y) { return x * y; });
}

TEST(Ad, DeltaGradientInGammaMatchesCentralDifferences) {
  const Vec2 x{0.31, -0.12};
  for (Vec2 g : {Vec2{0.0, 0.0}, Vec2{-0.1, 0.2}, Vec2{0.15, -0.55}}) {
    const double sdf = norm(x - g) - 0.5;
    ASSERT_LT(std::abs(sdf), 0.2);
    Tape tape;
    const Point<Var> gv{Var::leaf(tape, g.x), Var::leaf(tape, g.y)};
    const Var d = delta<Var>(gv, {Var(x.x), Var(x.y)});
    std::vector<double> adj;
    tape.backward(d.index(), adj);
    const double h = 1e-6;
    const double fdx = (delta<double>({g.x + h, g.y}, x) - delta<double>({g.x - h, g.y}, x)) / (2 * h);
    const double fdy = (delta<double>({g.x, g.y + h}, x) - delta<double>({g.x, g.y - h}, x)) / (2 * h);
    EXPECT_LT(std::abs(adj[gv.x.index()] - fdx) / std::abs(fdx), 1e-5);
    EXPECT_LT(std::abs(adj[gv.y.index()] - fdy) / std::abs(fdy), 1e-5);
  }
}

TEST(Ad, Norm2IsFlooredAtOrigin) {
  Tape tape;
  const Var a = Var::leaf(tape, 0.0);
  const Var b = Var::leaf(tape, 0.0);
  const Var n = ad::norm2(a, b);
  EXPECT_EQ(n.value(), ad::kNormFloor);
  std::vector<double> adj;
  tape.backward(n.index(), adj);
  EXPECT_EQ(adj[a.index()], 0.0);
}

TEST(Ad, SigmoidStableForLargeArguments) {
  EXPECT_EQ(ad::sigmoid(-800.0), 0.0);
  EXPECT_EQ(ad::sigmoid(800.0), 1.0);
  EXPECT_TRUE(std::isfinite(ad::sigmoid(Jet<double>::variable_x(-800.0)).dxx));
}
