#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ltpinn/ad.hpp"
#include "ltpinn/types.hpp"

namespace ltpinn {

enum class PdeKind { Elastic, Laplace, SteadyNS, PressurePoisson };

std::string to_string(PdeKind kind);
PdeKind pde_kind_from_string(std::string_view name);

struct MaterialParams {
  double E = 1.0;
  double nu = 0.33;
  void validate() const;
};

struct FlowParams {
  double Re = 1.0;
  void validate() const;
};

struct PdeProblem {
  PdeKind kind = PdeKind::Laplace;
  MaterialParams material;
  FlowParams flow;

  /// Solution arity the network must produce: 2, 1, 3, 3.
  int out_dim() const;
  /// Number of residual components: 2, 1, 3, 1.
  int residual_dim() const;
  void validate() const;
};

template <class S>
using Jets = std::span<const ad::Jet<S>>;

/// Evaluates any twice-differentiable field source (a network or a probe
/// expression) at (x, y), returning one jet per component. `field` must be
/// callable as field(Jet<S> x, Jet<S> y) -> std::vector<Jet<S>>.
template <class S, class F>
std::vector<ad::Jet<S>> field_jets(F&& field, const S& x, const S& y) {
  return field(ad::Jet<S>::variable_x(x), ad::Jet<S>::variable_y(y));
}

template <class S>
struct Stress {
  S xx;
  S yy;
  S xy;
};

/// Plane linear-elastic stress from the displacement gradients of (ux, uy).
/// Shear uses sigma_xy = E / (1 - nu) * eps_xy.
template <class S>
Stress<S> stress_elastic(const ad::Jet<S>& ux, const ad::Jet<S>& uy, const MaterialParams& m) {
  if (m.nu * m.nu == 1.0) throw NumericError("constitutive singularity: nu = +-1");
  const double c1 = m.E / (1.0 - m.nu * m.nu);
  const double c2 = m.E / (1.0 - m.nu);
  const S exx = ux.dx;
  const S eyy = uy.dy;
  const S exy = (ux.dy + uy.dx) * 0.5;
  return {(exx + eyy * m.nu) * c1, (eyy + exx * m.nu) * c1, exy * c2};
}

template <class S>
std::vector<S> residual_laplace(Jets<S> u) {
  return {u[0].dxx + u[0].dyy};
}

/// Divergence of the elastic stress: (d sxx/dx + d sxy/dy, d sxy/dx + d syy/dy).
template <class S>
std::vector<S> residual_elastic(Jets<S> u, const MaterialParams& m) {
  if (m.nu * m.nu == 1.0) throw NumericError("constitutive singularity: nu = +-1");
  const double c1 = m.E / (1.0 - m.nu * m.nu);
  const double c2 = m.E / (1.0 - m.nu);
  const ad::Jet<S>& a = u[0];
  const ad::Jet<S>& b = u[1];
  S rx = (a.dxx + b.dxy * m.nu) * c1 + (a.dyy + b.dxy) * (0.5 * c2);
  S ry = (a.dxy + b.dxx) * (0.5 * c2) + (b.dyy + a.dxy * m.nu) * c1;
  return {rx, ry};
}

/// (continuity, momentum_x, momentum_y) for the steady incompressible
/// equations (u . grad) u + grad p - (1/Re) lap u = 0, div u = 0.
template <class S>
std::vector<S> residual_steady_ns(Jets<S> f, const FlowParams& flow) {
  const ad::Jet<S>& u = f[0];
  const ad::Jet<S>& v = f[1];
  const ad::Jet<S>& p = f[2];
  const double nu = 1.0 / flow.Re;
  S cont = u.dx + v.dy;
  S mx = u.v * u.dx + v.v * u.dy + p.dx - (u.dxx + u.dyy) * nu;
  S my = u.v * v.dx + v.v * v.dy + p.dy - (v.dxx + v.dyy) * nu;
  return {cont, mx, my};
}

/// lap p + d_i d_j (u_i u_j), with the products differentiated analytically.
template <class S>
std::vector<S> residual_pressure_poisson(Jets<S> f) {
  const ad::Jet<S>& u = f[0];
  const ad::Jet<S>& v = f[1];
  const ad::Jet<S>& p = f[2];
  S uu_xx = (u.dx * u.dx + u.v * u.dxx) * 2.0;
  S uv_xy = u.dxy * v.v + u.dx * v.dy + u.dy * v.dx + u.v * v.dxy;
  S vv_yy = (v.dy * v.dy + v.v * v.dyy) * 2.0;
  return {p.dxx + p.dyy + uu_xx + uv_xy * 2.0 + vv_yy};
}

template <class S>
std::vector<S> residual(const PdeProblem& problem, Jets<S> u) {
  switch (problem.kind) {
    case PdeKind::Elastic:
      return residual_elastic<S>(u, problem.material);
    case PdeKind::Laplace:
      return residual_laplace<S>(u);
    case PdeKind::SteadyNS:
      return residual_steady_ns<S>(u, problem.flow);
    case PdeKind::PressurePoisson:
      return residual_pressure_poisson<S>(u);
  }
  throw ConfigError("unknown PDE kind");
}

inline constexpr double kDefaultDensitySharpness = -10.0;

/// Normalised density 1 / (1 + exp(-c * rho)).
template <class S>
S density_indicator(const S& rho, double c = kDefaultDensitySharpness) {
  using ad::sigmoid;
  return sigmoid(rho * c);
}

/// (1 - rho_hat) * R + rho_hat * (u - u_b) per component. `u` holds the
/// solution components followed by the raw density channel. With an empty
/// `bc_value` only the masked PDE part (1 - rho_hat) * R is returned.
template <class S>
std::vector<S> dt_density_residual(const PdeProblem& problem, Jets<S> u, std::span<const double> bc_value,
                                   double c = kDefaultDensitySharpness) {
  if (c == 0.0) throw ConfigError("density sharpness c must be non-zero");
  const int n = problem.out_dim();
  if (static_cast<int>(u.size()) != n + 1) throw ConfigError("density residual needs the density channel");
  if (problem.residual_dim() != n)
    throw ConfigError("density formulation needs one residual per solution component");
  if (!bc_value.empty() && static_cast<int>(bc_value.size()) != n)
    throw ConfigError("density boundary value has the wrong arity");
  const S rho_hat = density_indicator(u[n].v, c);
  const S keep = S(1.0) - rho_hat;
  std::vector<S> r = residual<S>(problem, u.first(n));
  for (int i = 0; i < n; ++i) {
    r[i] = keep * r[i];
    if (!bc_value.empty()) r[i] = r[i] + rho_hat * (u[i].v - S(bc_value[i]));
  }
  return r;
}

}  // namespace ltpinn
