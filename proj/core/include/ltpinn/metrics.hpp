#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ltpinn/geometry.hpp"
#include "ltpinn/pde.hpp"
#include "ltpinn/types.hpp"

namespace ltpinn {

class UndefinedMetricError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// ||pred - ref||_2 / ||ref||_2.
double relative_l2(std::span<const double> pred, std::span<const double> ref);

/// mean |pred - ref| / (max ref - min ref).
double nmae(std::span<const double> pred, std::span<const double> ref);

struct FluxSample {
  double angle = 0.0;
  double flux = 0.0;
};

/// grad u[component] . n at n_samples equiangular points of the r = 0.5 ring.
template <class F>
std::vector<FluxSample> boundary_flux(F&& field, const CirclePatch& patch, std::size_t n_samples,
                                      int component = 0) {
  if (n_samples < 4) throw ConfigError("boundary_flux: n_samples must be >= 4");
  std::vector<FluxSample> out;
  out.reserve(n_samples);
  const double r = patch.radius();
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_samples);
    const Vec2 n{std::cos(a), std::sin(a)};
    const Vec2 x = patch.gamma + r * n;
    const auto u = field_jets<double>(field, x.x, x.y);
    out.push_back({a, u[component].dx * n.x + u[component].dy * n.y});
  }
  return out;
}

double mean_flux(std::span<const FluxSample> samples);

struct Force {
  double lift = 0.0;
  double drag = 0.0;
};

/// Pressure force -sum over patches of the closed integral of p n ds,
/// equiangular trapezoid rule on every r = 0.5 ring.
Force lift_drag(const std::function<double(Vec2)>& pressure, std::span<const CirclePatch> patches,
                std::size_t n_quad);

/// Uniform n x n grid over `region` without the points inside any patch.
std::vector<Vec2> metric_grid(const Roi& region, std::span<const CirclePatch> patches, std::size_t n = 128);

struct MetricRecord {
  std::string metric;
  std::string field;
  double value = 0.0;
};

/// JSON array of {metric, field, value, config_hash}.
std::string metrics_json(std::span<const MetricRecord> records, const std::string& config_hash);

}  // namespace ltpinn
