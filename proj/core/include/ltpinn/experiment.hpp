#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ltpinn/config.hpp"
#include "ltpinn/contour.hpp"
#include "ltpinn/metrics.hpp"
#include "ltpinn/oracle.hpp"
#include "ltpinn/sampling.hpp"
#include "ltpinn/training.hpp"

namespace ltpinn {

/// Everything a run needs besides the trainable state.
struct Experiment {
  ExperimentConfig config;
  SampleSet samples;
  InputNormalizer norm;
  std::vector<Vec2> initial_gamma;       ///< empty in dt mode
  std::vector<CirclePatch> reference;    ///< true patches, when known
  std::optional<AnnulusProblem> oracle;  ///< closed-form field (annulus / laplace stand-in)
};

/// Builds the sample set for the configured scenario:
///   annulus   closed-form T at random points away from the true centre
///   laplace   closed-form T (or data_csv) subsampled from the grid
///   elastic   fixed right edge, pressure on the left, free top/bottom (+ data_csv)
///   flow      unit inflow left, p = 0 right, symmetry top/bottom
///   rearrange unit inflow left, sine outlet u, periodic top/bottom
Experiment build_experiment(const ExperimentConfig& config);

TrainState initial_state(const Experiment& exp);

LossEvaluator make_loss(const Experiment& exp);

/// Output names: T | ux uy | u v p, then rho in dt mode.
std::vector<std::string> field_names(const ExperimentConfig& config);

/// gamma_error, relative_l2, nmae, boundary_flux_error, lift, drag, outlet_l2.
const std::vector<std::string>& known_metrics();
std::vector<std::string> default_metrics(const Experiment& exp);

/// Evaluates `names` at `state`. Field metrics compare against `reference`
/// measurements when given, otherwise against the closed-form oracle.
std::vector<MetricRecord> compute_metrics(const Experiment& exp, const TrainState& state,
                                          const std::vector<std::string>& names,
                                          const SampleSet* reference = nullptr);

/// Network outputs at the metric grid points (x fastest, patches excluded).
void write_field_csv(const std::filesystem::path& path, const Experiment& exp, const TrainState& state);

struct RunResult {
  TrainState state;
  TrainResult train;
  std::vector<MetricRecord> metrics;
};

/// Trains and writes config.ini, loss.csv, gamma.csv, field.csv,
/// topology.json, metrics.json and checkpoint.bin into config.output_dir.
/// loss.csv and gamma.csv are streamed, so they survive a diverged run.
RunResult run_train(const Config& config, std::ostream* progress = nullptr);

/// Density channel mapped through the indicator on an n x n grid over the core.
ScalarGrid density_grid(const Experiment& exp, const TrainState& state, std::size_t n);

struct TopologyExport {
  std::string json;
  std::string svg;
  bool empty = false;  ///< dt mode found no node above the threshold
};

/// LT: circle list from gamma. DT: threshold the density, keep the largest
/// component, contour it; with a non-empty sweep, one entry per threshold.
TopologyExport export_topology(const Experiment& exp, const TrainState& state, double threshold,
                               const std::vector<double>& sweep = {});

/// Closed-form annulus field sampled on the metric grid as a sample CSV.
void export_oracle_csv(const std::filesystem::path& path, const Experiment& exp);

}  // namespace ltpinn
