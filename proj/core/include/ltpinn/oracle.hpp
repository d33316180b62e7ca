#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ltpinn/ad.hpp"
#include "ltpinn/pde.hpp"
#include "ltpinn/types.hpp"

namespace ltpinn {

/// Conduction in the annulus inner <= r <= outer around `center` with
/// flux q across the inner circle (outward radial normal) and T = 0 on the
/// outer circle.
struct AnnulusProblem {
  double inner_radius = 0.5;
  double outer_radius = 2.0;
  double q = -0.5;
  Vec2 center;

  void validate() const;
};

/// T(r) = inner * q * ln(r / outer). Generic so the closed form can be
/// differentiated by the engine; no domain check.
template <class S>
S annulus_temperature_expr(const AnnulusProblem& p, const S& x, const S& y) {
  using ad::log;
  const S r = ad::norm2(x - p.center.x, y - p.center.y);
  return log(r / p.outer_radius) * (p.inner_radius * p.q);
}

/// Closed form with the annulus domain check.
double annulus_temperature(const AnnulusProblem& p, Vec2 x);

/// Uniform-grid field: values(j, i) at (x_min + i h_x, y_min + j h_y).
struct GridField {
  Roi region;
  std::size_t nx = 0;
  std::size_t ny = 0;
  Eigen::MatrixXd values;  // ny x nx

  Vec2 point(std::size_t i, std::size_t j) const;
};

/// 5-point finite-difference solution of lap u = f with u = g on the
/// boundary of `region`, solved by sparse Cholesky.
GridField fd_poisson_dirichlet(std::size_t nx, std::size_t ny, const Roi& region,
                               const std::function<double(Vec2)>& f, const std::function<double(Vec2)>& g);

/// A probe field for the residual operators together with its expected
/// residual (zero for null fields).
struct ManufacturedCase {
  std::string name;
  std::function<std::vector<ad::Jet<double>>(const ad::Jet<double>&, const ad::Jet<double>&)> field;
  std::vector<double> expected;
};

std::vector<ManufacturedCase> manufactured_suite(PdeKind kind, const PdeProblem& problem = {});

}  // namespace ltpinn
