#include "ltpinn/pde.hpp"

#include "ltpinn/io.hpp"

namespace ltpinn {

std::string to_string(PdeKind kind) {
  switch (kind) {
    case PdeKind::Elastic:
      return "elastic";
    case PdeKind::Laplace:
      return "laplace";
    case PdeKind::SteadyNS:
      return "steady_ns";
    case PdeKind::PressurePoisson:
      return "pressure_poisson";
  }
  return "unknown";
}

PdeKind pde_kind_from_string(std::string_view name) {
  if (name == "elastic") return PdeKind::Elastic;
  if (name == "laplace") return PdeKind::Laplace;
  if (name == "steady_ns") return PdeKind::SteadyNS;
  if (name == "pressure_poisson") return PdeKind::PressurePoisson;
  throw ConfigError("unknown pde kind '" + std::string(name) +
                    "' (expected elastic, laplace, steady_ns, pressure_poisson)");
}

void MaterialParams::validate() const {
  if (!(E > 0.0)) throw ConfigError("pde.E must be positive, got " + format_real(E));
  if (!(nu >= 0.0 && nu < 0.5)) throw ConfigError("pde.nu must lie in [0, 0.5), got " + format_real(nu));
}

void FlowParams::validate() const {
  if (!(Re > 0.0)) throw ConfigError("pde.Re must be positive, got " + format_real(Re));
}

int PdeProblem::out_dim() const {
  switch (kind) {
    case PdeKind::Elastic:
      return 2;
    case PdeKind::Laplace:
      return 1;
    case PdeKind::SteadyNS:
    case PdeKind::PressurePoisson:
      return 3;
  }
  return 0;
}

int PdeProblem::residual_dim() const {
  switch (kind) {
    case PdeKind::Elastic:
      return 2;
    case PdeKind::Laplace:
    case PdeKind::PressurePoisson:
      return 1;
    case PdeKind::SteadyNS:
      return 3;
  }
  return 0;
}

void PdeProblem::validate() const {
  if (kind == PdeKind::Elastic) material.validate();
  if (kind == PdeKind::SteadyNS) flow.validate();
}

}  // namespace ltpinn
