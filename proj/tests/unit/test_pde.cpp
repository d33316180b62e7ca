#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "ltpinn/oracle.hpp"
#include "ltpinn/pde.hpp"

using namespace ltpinn;
using J = ad::Jet<double>;
using Fields = std::vector<J>;

namespace {

template <class F>
std::vector<double> residual_at(const PdeProblem& p, F&& field, double x, double y) {
  const auto u = field_jets<double>(field, x, y);
  return residual<double>(p, u);
}

PdeProblem problem(PdeKind kind) {
  PdeProblem p;
  p.kind = kind;
  return p;
}

const double kPoints[][2] = {{0.1, 0.2}, {-0.7, 0.4}, {0.9, -1.3}, {2.0, 0.5}};

}  // namespace

TEST(Pde, Arities) {
  EXPECT_EQ(problem(PdeKind::Elastic).out_dim(), 2);
  EXPECT_EQ(problem(PdeKind::Elastic).residual_dim(), 2);
  EXPECT_EQ(problem(PdeKind::Laplace).out_dim(), 1);
  EXPECT_EQ(problem(PdeKind::SteadyNS).out_dim(), 3);
  EXPECT_EQ(problem(PdeKind::SteadyNS).residual_dim(), 3);
  EXPECT_EQ(problem(PdeKind::PressurePoisson).out_dim(), 3);
  EXPECT_EQ(problem(PdeKind::PressurePoisson).residual_dim(), 1);
  for (auto k : {PdeKind::Elastic, PdeKind::Laplace, PdeKind::SteadyNS, PdeKind::PressurePoisson})
    EXPECT_EQ(pde_kind_from_string(to_string(k)), k);
  EXPECT_THROW(pde_kind_from_string("heat"), ConfigError);
}

TEST(Pde, ManufacturedSuiteResiduals) {
  for (auto k : {PdeKind::Elastic, PdeKind::Laplace, PdeKind::SteadyNS, PdeKind::PressurePoisson}) {
    const PdeProblem p = problem(k);
    const auto suite = manufactured_suite(k, p);
    ASSERT_FALSE(suite.empty());
    for (const auto& c : suite)
      for (const auto& x : kPoints) {
        const auto r = residual_at(p, c.field, x[0], x[1]);
        ASSERT_EQ(r.size(), c.expected.size()) << c.name;
        for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(r[i], c.expected[i], 1e-10) << c.name;
      }
  }
}

TEST(Pde, LaplaceOfQuadratics) {
  const PdeProblem p = problem(PdeKind::Laplace);
  EXPECT_NEAR(residual_at(p, [](const J& x, const J& y) { return Fields{x * x + y * y}; }, 0.3, 0.1)[0], 4.0, 1e-14);
  EXPECT_NEAR(residual_at(p, [](const J& x, const J& y) { return Fields{3.0 * x * x - y * y}; }, -1, 2)[0], 4.0,
              1e-14);
}

TEST(Pde, ElasticStressOfUnitStretch) {
  const MaterialParams m{1.0, 0.33};
  const auto s = stress_elastic(J::variable_x(0.4), J(0.0), m);
  EXPECT_NEAR(s.xx, 1.0 / (1.0 - 0.33 * 0.33), 1e-15);
  EXPECT_NEAR(s.yy, 0.33 / (1.0 - 0.33 * 0.33), 1e-15);
  EXPECT_EQ(s.xy, 0.0);
  // pure shear ux = y: eps_xy = 1/2
  const auto t = stress_elastic(J::variable_y(0.1), J(0.0), m);
  EXPECT_NEAR(t.xy, 0.5 / (1.0 - 0.33), 1e-15);
}

TEST(Pde, ElasticResidualOfQuadratics) {
  const PdeProblem p = problem(PdeKind::Elastic);
  const double nu = p.material.nu;
  const auto a = residual_at(p, [](const J& x, const J&) { return Fields{x * x, J(0.0)}; }, 0.2, 0.3);
  EXPECT_NEAR(a[0], 2.0 / (1.0 - nu * nu), 1e-14);
  EXPECT_NEAR(a[1], 0.0, 1e-14);
  const auto b = residual_at(p, [](const J&, const J& y) { return Fields{y * y, J(0.0)}; }, 0.2, 0.3);
  EXPECT_NEAR(b[0], 1.0 / (1.0 - nu), 1e-14);
  EXPECT_NEAR(b[1], 0.0, 1e-14);
}

TEST(Pde, ElasticResidualIsLinear) {
  const PdeProblem p = problem(PdeKind::Elastic);
  auto f = [](const J& x, const J& y) { return Fields{ad::tanh(x) * y, ad::exp(x * 0.3) * y * y}; };
  auto g = [](const J& x, const J& y) { return Fields{x * x * y, ad::tanh(x + y)}; };
  auto h = [&](const J& x, const J& y) {
    const auto a = f(x, y);
    const auto b = g(x, y);
    return Fields{a[0] * 2.0 - b[0] * 0.5, a[1] * 2.0 - b[1] * 0.5};
  };
  for (const auto& x : kPoints) {
    const auto rf = residual_at(p, f, x[0], x[1]);
    const auto rg = residual_at(p, g, x[0], x[1]);
    const auto rh = residual_at(p, h, x[0], x[1]);
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(rh[i], 2.0 * rf[i] - 0.5 * rg[i], 1e-12);
  }
}

TEST(Pde, ElasticSingularityAndValidation) {
  EXPECT_THROW(stress_elastic(J(0.0), J(0.0), MaterialParams{1.0, 1.0}), NumericError);
  EXPECT_THROW(MaterialParams({1.0, 0.5}).validate(), ConfigError);
  EXPECT_THROW(MaterialParams({0.0, 0.3}).validate(), ConfigError);
  EXPECT_THROW(FlowParams{0.0}.validate(), ConfigError);
}

TEST(Pde, NavierStokesViscousTerm) {
  PdeProblem p = problem(PdeKind::SteadyNS);
  p.flow.Re = 4.0;
  // u = y^2: continuity holds, convection vanishes, momentum_x = -lap u / Re
  const auto r = residual_at(p, [](const J&, const J& y) { return Fields{y * y, J(0.0), J(0.0)}; }, 0.5, 0.7);
  EXPECT_NEAR(r[0], 0.0, 1e-15);
  EXPECT_NEAR(r[1], -2.0 / 4.0, 1e-15);
  EXPECT_NEAR(r[2], 0.0, 1e-15);
  // u = (x, 0): continuity 1, convection u u_x = x
  const auto s = residual_at(p, [](const J& x, const J&) { return Fields{x, J(0.0), J(0.0)}; }, 0.3, 0.0);
  EXPECT_NEAR(s[0], 1.0, 1e-15);
  EXPECT_NEAR(s[1], 0.3, 1e-15);
}

TEST(Pde, PressurePoissonSourceOfLinearFlow) {
  const PdeProblem p = problem(PdeKind::PressurePoisson);
  // u = (y, 0): d_i d_j (u_i u_j) = d_xx (y^2) = 0; u = (x, 0): d_xx (x^2) = 2
  EXPECT_NEAR(residual_at(p, [](const J&, const J& y) { return Fields{y, J(0.0), J(0.0)}; }, 0.1, 0.2)[0], 0.0,
              1e-15);
  EXPECT_NEAR(residual_at(p, [](const J& x, const J&) { return Fields{x, J(0.0), J(0.0)}; }, 0.1, 0.2)[0], 2.0,
              1e-15);
  // u = (y, x): 2 d_xy (x y) = 2
  EXPECT_NEAR(residual_at(p, [](const J& x, const J& y) { return Fields{y, x, J(0.0)}; }, 0.1, 0.2)[0], 2.0, 1e-15);
}

TEST(Pde, DensityResidualLimits) {
  const PdeProblem p = problem(PdeKind::Laplace);
  const double ub[] = {0.25};
  auto with_rho = [](double rho) {
    return [rho](const J& x, const J& y) { return Fields{x * x + y * y, J(rho)}; };
  };
  auto eval = [&](double rho, std::span<const double> bc) {
    const auto u = field_jets<double>(with_rho(rho), 0.5, 0.0);
    return dt_density_residual<double>(p, u, bc)[0];
  };
  // rho_hat = sigmoid(-10 rho): fluid for large rho, solid for very negative rho
  EXPECT_NEAR(eval(10.0, ub), 4.0, 1e-30);
  EXPECT_NEAR(eval(-10.0, ub), 0.25 - 0.25, 1e-30);
  EXPECT_NEAR(eval(0.0, ub), 0.5 * 4.0 + 0.5 * (0.25 - 0.25), 1e-15);
  const double ub2[] = {1.0};
  EXPECT_NEAR(eval(0.0, ub2), 0.5 * 4.0 + 0.5 * (0.25 - 1.0), 1e-15);
  EXPECT_NEAR(eval(0.0, {}), 2.0, 1e-15);
  EXPECT_NEAR(density_indicator(0.3), 1.0 / (1.0 + std::exp(3.0)), 1e-15);
}

TEST(Pde, DensityResidualValidation) {
  const PdeProblem lap = problem(PdeKind::Laplace);
  auto one = [](const J& x, const J&) { return Fields{x}; };
  const auto u1 = field_jets<double>(one, 0.1, 0.1);
  EXPECT_THROW(dt_density_residual<double>(lap, u1, {}), ConfigError);
  auto two = [](const J& x, const J&) { return Fields{x, x}; };
  const auto u2 = field_jets<double>(two, 0.1, 0.1);
  EXPECT_THROW(dt_density_residual<double>(lap, u2, {}, 0.0), ConfigError);
  const double bad[] = {1.0, 2.0};
  EXPECT_THROW(dt_density_residual<double>(lap, u2, bad), ConfigError);
  auto four = [](const J& x, const J&) { return Fields{x, x, x, x}; };
  const auto u4 = field_jets<double>(four, 0.1, 0.1);
  EXPECT_THROW(dt_density_residual<double>(problem(PdeKind::PressurePoisson), u4, {}), ConfigError);
}
