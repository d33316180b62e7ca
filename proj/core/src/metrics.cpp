#include "ltpinn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ltpinn/io.hpp"
#include "ltpinn/sampling.hpp"

namespace ltpinn {

namespace {

void check_lengths(std::span<const double> pred, std::span<const double> ref, const char* name) {
  if (pred.size() != ref.size())
    throw ConfigError(std::string(name) + ": prediction has " + std::to_string(pred.size()) +
                      " values, reference has " + std::to_string(ref.size()));
  if (ref.empty()) throw UndefinedMetricError(std::string(name) + ": empty reference");
}

}  // namespace

double relative_l2(std::span<const double> pred, std::span<const double> ref) {
  check_lengths(pred, ref, "relative_l2");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    num += (pred[i] - ref[i]) * (pred[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  if (den == 0.0) throw UndefinedMetricError("relative_l2: reference is identically zero");
  return std::sqrt(num / den);
}

double nmae(std::span<const double> pred, std::span<const double> ref) {
  check_lengths(pred, ref, "nmae");
  const auto [lo, hi] = std::minmax_element(ref.begin(), ref.end());
  const double range = *hi - *lo;
  if (range == 0.0) throw UndefinedMetricError("nmae: reference has zero range");
  double sum = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) sum += std::abs(pred[i] - ref[i]);
  return sum / static_cast<double>(ref.size()) / range;
}

double mean_flux(std::span<const FluxSample> samples) {
  if (samples.empty()) throw UndefinedMetricError("mean_flux: no samples");
  double s = 0.0;
  for (const auto& f : samples) s += f.flux;
  return s / static_cast<double>(samples.size());
}

Force lift_drag(const std::function<double(Vec2)>& pressure, std::span<const CirclePatch> patches,
                std::size_t n_quad) {
  if (n_quad < 16) throw ConfigError("lift_drag: n_quad must be >= 16");
  Force f;
  for (const auto& p : patches) {
    const double r = p.radius();
    const double ds = 2.0 * std::numbers::pi * r / static_cast<double>(n_quad);
    double fx = 0.0;
    double fy = 0.0;
    for (std::size_t i = 0; i < n_quad; ++i) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_quad);
      const Vec2 n{std::cos(a), std::sin(a)};
      const double pv = pressure(p.gamma + r * n);
      fx += pv * n.x;
      fy += pv * n.y;
    }
    f.drag -= fx * ds;
    f.lift -= fy * ds;
  }
  return f;
}

std::vector<Vec2> metric_grid(const Roi& region, std::span<const CirclePatch> patches, std::size_t n) {
  std::vector<Vec2> out;
  for (const Vec2& x : uniform_grid(region, n, n)) {
    bool inside = false;
    for (const auto& p : patches) inside = inside || signed_distance(p, x) < 0.0;
    if (!inside) out.push_back(x);
  }
  return out;
}

std::string metrics_json(std::span<const MetricRecord> records, const std::string& config_hash) {
  std::string out = "[";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    out += i == 0 ? "\n" : ",\n";
    out += "  {\"metric\": " + json_string(r.metric) + ", \"field\": " + json_string(r.field) +
           ", \"value\": " + json_number(r.value) + ", \"config_hash\": " + json_string(config_hash) + "}";
  }
  out += records.empty() ? "]\n" : "\n]\n";
  return out;
}

}  // namespace ltpinn
