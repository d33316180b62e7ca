#include "ltpinn/oracle.hpp"

#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "ltpinn/io.hpp"

namespace ltpinn {

void AnnulusProblem::validate() const {
  if (!(inner_radius > 0.0)) throw ConfigError("annulus inner radius must be positive");
  if (!(outer_radius > inner_radius)) throw ConfigError("annulus outer radius must exceed the inner radius");
}

double annulus_temperature(const AnnulusProblem& p, Vec2 x) {
  p.validate();
  const double r = std::hypot(x.x - p.center.x, x.y - p.center.y);
  const double tol = 1e-12;
  if (r < p.inner_radius - tol || r > p.outer_radius + tol)
    throw ad::DomainError("annulus_temperature (radius)", r);
  return p.inner_radius * p.q * std::log(r / p.outer_radius);
}

Vec2 GridField::point(std::size_t i, std::size_t j) const {
  const double x = i + 1 == nx ? region.x_max : region.x_min + region.width() * static_cast<double>(i) / (nx - 1);
  const double y = j + 1 == ny ? region.y_max : region.y_min + region.height() * static_cast<double>(j) / (ny - 1);
  return {x, y};
}

GridField fd_poisson_dirichlet(std::size_t nx, std::size_t ny, const Roi& region,
                               const std::function<double(Vec2)>& f, const std::function<double(Vec2)>& g) {
  if (nx < 3 || ny < 3) throw ConfigError("fd_poisson_dirichlet: nx and ny must be >= 3");
  if (!region.valid()) throw ConfigError("fd_poisson_dirichlet: degenerate region");
  GridField out{region, nx, ny, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ny), static_cast<Eigen::Index>(nx))};
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      if (i == 0 || j == 0 || i + 1 == nx || j + 1 == ny) out.values(j, i) = g(out.point(i, j));

  const double hx = region.width() / static_cast<double>(nx - 1);
  const double hy = region.height() / static_cast<double>(ny - 1);
  const double ax = 1.0 / (hx * hx);
  const double ay = 1.0 / (hy * hy);
  const std::size_t mx = nx - 2;
  const std::size_t my = ny - 2;
  const auto id = [&](std::size_t i, std::size_t j) { return static_cast<Eigen::Index>((j - 1) * mx + (i - 1)); };

  // Assemble -lap (symmetric positive definite).
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * mx * my);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(mx * my));
  for (std::size_t j = 1; j + 1 < ny; ++j) {
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      const Eigen::Index k = id(i, j);
      double b = -f(out.point(i, j));
      trip.emplace_back(k, k, 2.0 * ax + 2.0 * ay);
      const std::pair<std::size_t, std::size_t> nb[4] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      for (int s = 0; s < 4; ++s) {
        const auto [ni, nj] = nb[s];
        const double a = s < 2 ? ax : ay;
        if (ni == 0 || nj == 0 || ni + 1 == nx || nj + 1 == ny)
          b += a * out.values(nj, ni);
        else
          trip.emplace_back(k, id(ni, nj), -a);
      }
      rhs(k) = b;
    }
  }
  Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(mx * my), static_cast<Eigen::Index>(mx * my));
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success) throw NumericError("fd_poisson_dirichlet: factorisation failed");
  const Eigen::VectorXd u = solver.solve(rhs);
  const double res = (A * u - rhs).lpNorm<Eigen::Infinity>() / std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
  if (solver.info() != Eigen::Success || !(res < 1e-10))
    throw NumericError("fd_poisson_dirichlet: solve did not converge, relative residual " + format_real(res));
  for (std::size_t j = 1; j + 1 < ny; ++j)
    for (std::size_t i = 1; i + 1 < nx; ++i) out.values(j, i) = u(id(i, j));
  return out;
}

std::vector<ManufacturedCase> manufactured_suite(PdeKind kind, const PdeProblem& problem) {
  using J = ad::Jet<double>;
  using Fields = std::vector<J>;
  std::vector<ManufacturedCase> out;
  switch (kind) {
    case PdeKind::Laplace:
      out.push_back({"T = x", [](const J& x, const J&) { return Fields{x}; }, {0.0}});
      out.push_back({"T = x^2 - y^2", [](const J& x, const J& y) { return Fields{x * x - y * y}; }, {0.0}});
      out.push_back(
          {"T = x^3 - 3xy^2", [](const J& x, const J& y) { return Fields{x * x * x - 3.0 * x * y * y}; }, {0.0}});
      out.push_back({"T = x^4 - 6x^2y^2 + y^4",
                     [](const J& x, const J& y) { return Fields{x * x * x * x - 6.0 * x * x * y * y + y * y * y * y}; },
                     {0.0}});
      out.push_back({"annulus closed form", [](const J& x, const J& y) {
                       return Fields{annulus_temperature_expr(AnnulusProblem{0.5, 2.0, -0.5, {0.2, -0.15}}, x, y)};
                     },
                     {0.0}});
      out.push_back({"T = x^2 + y^2", [](const J& x, const J& y) { return Fields{x * x + y * y}; }, {4.0}});
      break;
    case PdeKind::Elastic: {
      const double nu = problem.material.nu;
      out.push_back({"rigid translation", [](const J&, const J&) { return Fields{J(0.3), J(-1.2)}; }, {0.0, 0.0}});
      out.push_back({"uniaxial stretch", [nu](const J& x, const J& y) { return Fields{0.01 * x, -nu * 0.01 * y}; },
                     {0.0, 0.0}});
      out.push_back({"infinitesimal rotation", [](const J& x, const J& y) { return Fields{-0.2 * y, 0.2 * x}; },
                     {0.0, 0.0}});
      out.push_back({"general affine", [](const J& x, const J& y) {
                       return Fields{0.1 + 0.3 * x - 0.7 * y, -0.4 + 0.25 * x + 0.9 * y};
                     },
                     {0.0, 0.0}});
      break;
    }
    case PdeKind::SteadyNS: {
      const double re = problem.flow.Re;
      out.push_back({"uniform flow", [](const J&, const J&) { return Fields{J(1.5), J(-0.5), J(2.0)}; },
                     {0.0, 0.0, 0.0}});
      out.push_back({"simple shear", [](const J&, const J& y) { return Fields{y, J(0.0), J(0.7)}; }, {0.0, 0.0, 0.0}});
      out.push_back({"Poiseuille", [re](const J& x, const J& y) {
                       return Fields{1.0 - y * y, J(0.0), -2.0 * x / re};
                     },
                     {0.0, 0.0, 0.0}});
      break;
    }
    case PdeKind::PressurePoisson:
      out.push_back({"uniform flow", [](const J&, const J&) { return Fields{J(1.0), J(0.5), J(3.0)}; }, {0.0}});
      out.push_back({"stagnation point", [](const J& x, const J& y) {
                       return Fields{x, -1.0 * y, -0.5 * (x * x + y * y)};
                     },
                     {0.0}});
      out.push_back({"quiescent, p = x^2 + y^2", [](const J& x, const J& y) {
                       return Fields{J(0.0), J(0.0), x * x + y * y};
                     },
                     {4.0}});
      break;
  }
  return out;
}

}  // namespace ltpinn
