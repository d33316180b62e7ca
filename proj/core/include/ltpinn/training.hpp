#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "ltpinn/losses.hpp"
#include "ltpinn/network.hpp"

namespace ltpinn {

struct AdamConfig {
  double lr = 1e-4;
  /// Learning rate for the patch centres; <= 0 means "same as lr".
  double lr_gamma = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  void validate() const;
};

struct TrainState {
  MlpParams theta;
  InputNormalizer norm;
  Mode mode = Mode::LT;
  double dt_c = kDefaultDensitySharpness;
  std::vector<Vec2> gamma;
  /// Adam moments over the joint vector (theta, then gamma x/y interleaved).
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t epoch = 0;

  std::size_t parameter_count() const { return theta.size() + 2 * gamma.size(); }
  friend bool operator==(const TrainState&, const TrainState&) = default;
};

TrainState make_state(MlpParams theta, InputNormalizer norm, Mode mode, std::vector<Vec2> gamma);

struct History {
  std::vector<std::int64_t> epochs;
  std::vector<LossBreakdown> losses;
  std::vector<std::vector<Vec2>> gammas;

  void record(std::int64_t epoch, const LossBreakdown& loss, std::span<const Vec2> gamma);
  std::size_t size() const { return epochs.size(); }
};

/// One bias-corrected Adam step on (theta, gamma); increments the epoch.
void adam_step(TrainState& state, const Gradients& grad, const AdamConfig& cfg);

/// True iff the last `window` snapshots exist and every consecutive pair
/// differs by less than `tol` in the max norm.
bool early_stop_check(const History& history, std::size_t window, double tol);

class DivergenceError : public NumericError {
 public:
  DivergenceError(std::int64_t epoch, double loss);
  std::int64_t epoch() const { return epoch_; }

 private:
  std::int64_t epoch_;
};

inline constexpr double kDivergenceThreshold = 1e12;

struct TrainOptions {
  std::int64_t epochs = 0;
  std::int64_t log_interval = 500;
  AdamConfig adam;
  bool early_stop = false;
  std::size_t early_stop_window = 10;
  double early_stop_tol = 1e-4;
  /// Called after every logged epoch; return false to stop.
  std::function<bool(std::int64_t epoch, const LossBreakdown&, const TrainState&)> on_log;
};

struct TrainResult {
  History history;
  bool stopped_early = false;
};

/// Full-batch training loop. The state at epoch e is logged before the
/// update of that epoch; the final state is always logged.
TrainResult train(TrainState& state, const LossEvaluator& loss, const TrainOptions& options);

// ---------------------------------------------------------------------------
// Checkpoints (little-endian, versioned; layout in docs/checkpoint.md).

class ShapeMismatchError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(const TrainState& state);
TrainState decode_checkpoint(std::vector<std::uint8_t> bytes);

void checkpoint_save(const TrainState& state, const std::filesystem::path& path);
TrainState checkpoint_load(const std::filesystem::path& path);
/// Loads and checks the network shape against `expected`.
TrainState checkpoint_load(const std::filesystem::path& path, const MlpConfig& expected);

}  // namespace ltpinn
