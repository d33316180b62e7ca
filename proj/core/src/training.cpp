#include "ltpinn/training.hpp"

#include <algorithm>
#include <cmath>

#include "ltpinn/io.hpp"

namespace ltpinn {

void AdamConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("adam.lr must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw ConfigError("adam.beta1 must lie in (0, 1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw ConfigError("adam.beta2 must lie in (0, 1)");
  if (!(eps > 0.0)) throw ConfigError("adam.eps must be positive");
}

TrainState make_state(MlpParams theta, InputNormalizer norm, Mode mode, std::vector<Vec2> gamma) {
  TrainState s;
  s.theta = std::move(theta);
  s.norm = norm;
  s.mode = mode;
  s.gamma = std::move(gamma);
  s.m.assign(s.parameter_count(), 0.0);
  s.v.assign(s.parameter_count(), 0.0);
  return s;
}

void History::record(std::int64_t epoch, const LossBreakdown& loss, std::span<const Vec2> gamma) {
  epochs.push_back(epoch);
  losses.push_back(loss);
  gammas.emplace_back(gamma.begin(), gamma.end());
}

void adam_step(TrainState& state, const Gradients& grad, const AdamConfig& cfg) {
  const std::size_t nt = state.theta.size();
  const std::size_t ng = state.gamma.size();
  if (grad.theta.size() != nt || grad.gamma.size() != ng)
    throw ConfigError("adam_step: gradient shape does not match the state");
  if (state.m.size() != nt + 2 * ng || state.v.size() != nt + 2 * ng)
    throw ConfigError("adam_step: moment shape does not match the state");
  for (double g : grad.theta)
    if (!std::isfinite(g)) throw NumericError("non-finite gradient in parameter group theta");
  for (const Vec2& g : grad.gamma)
    if (!std::isfinite(g.x) || !std::isfinite(g.y)) throw NumericError("non-finite gradient in parameter group gamma");

  const double t = static_cast<double>(state.epoch + 1);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  auto update = [&](double& p, double g, std::size_t i, double lr) {
    double& m = state.m[i];
    double& v = state.v[i];
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
    p -= lr * (m / bc1) / (std::sqrt(v / bc2) + cfg.eps);
  };
  std::span<double> theta = state.theta.flat();
  for (std::size_t i = 0; i < nt; ++i) update(theta[i], grad.theta[i], i, cfg.lr);
  const double lr_g = cfg.lr_gamma > 0.0 ? cfg.lr_gamma : cfg.lr;
  for (std::size_t k = 0; k < ng; ++k) {
    update(state.gamma[k].x, grad.gamma[k].x, nt + 2 * k, lr_g);
    update(state.gamma[k].y, grad.gamma[k].y, nt + 2 * k + 1, lr_g);
  }
  ++state.epoch;
}

bool early_stop_check(const History& history, std::size_t window, double tol) {
  if (window < 2) throw ConfigError("early-stop window must be >= 2");
  const std::size_t n = history.gammas.size();
  if (n < window) return false;
  double worst = 0.0;
  for (std::size_t i = n - window + 1; i < n; ++i) {
    const auto& a = history.gammas[i - 1];
    const auto& b = history.gammas[i];
    for (std::size_t k = 0; k < a.size(); ++k)
      worst = std::max({worst, std::abs(a[k].x - b[k].x), std::abs(a[k].y - b[k].y)});
  }
  return worst < tol;
}

DivergenceError::DivergenceError(std::int64_t epoch, double loss)
    : NumericError("training diverged at epoch " + std::to_string(epoch) + ": total loss " + format_real(loss)),
      epoch_(epoch) {}

TrainResult train(TrainState& state, const LossEvaluator& loss, const TrainOptions& options) {
  options.adam.validate();
  if (options.epochs < 0) throw ConfigError("run.epochs must be >= 0");
  if (options.log_interval < 1) throw ConfigError("run.log_interval must be >= 1");
  TrainResult result;
  Gradients grad;
  const std::int64_t start = state.epoch;
  const std::int64_t stop = start + options.epochs;

  auto log = [&](const LossBreakdown& b) {
    result.history.record(state.epoch, b, state.gamma);
    if (options.on_log && !options.on_log(state.epoch, b, state)) return false;
    if (options.early_stop && early_stop_check(result.history, options.early_stop_window, options.early_stop_tol)) {
      result.stopped_early = true;
      return false;
    }
    return true;
  };

  while (state.epoch < stop) {
    const LossBreakdown b = loss.evaluate(state.theta, state.gamma, &grad);
    if (!(b.total <= kDivergenceThreshold)) throw DivergenceError(state.epoch, b.total);
    if ((state.epoch - start) % options.log_interval == 0 && !log(b)) return result;
    adam_step(state, grad, options.adam);
  }
  const LossBreakdown b = loss.evaluate(state.theta, state.gamma);
  if (!(b.total <= kDivergenceThreshold)) throw DivergenceError(state.epoch, b.total);
  log(b);
  return result;
}

// ---------------------------------------------------------------------------
// Checkpoints.

namespace {

constexpr const char kMagic[] = "LTPINNCK";
constexpr const char kEndMagic[] = "LTPINEND";

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const TrainState& s) {
  const MlpConfig& c = s.theta.config();
  ByteWriter w;
  w.raw(std::string_view(kMagic, 8));
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(c.n_layers));
  w.u32(static_cast<std::uint32_t>(c.width));
  w.u32(static_cast<std::uint32_t>(c.in_dim));
  w.u32(static_cast<std::uint32_t>(c.out_dim));
  w.u8(c.has_density_channel ? 1 : 0);
  w.u8(s.mode == Mode::LT ? 0 : 1);
  w.u16(0);
  w.f64(s.norm.cx);
  w.f64(s.norm.cy);
  w.f64(s.norm.sx);
  w.f64(s.norm.sy);
  w.f64(s.dt_c);
  w.i64(s.epoch);
  w.u32(static_cast<std::uint32_t>(s.gamma.size()));
  w.u64(s.theta.size());
  for (double x : s.theta.flat()) w.f64(x);
  for (const Vec2& g : s.gamma) {
    w.f64(g.x);
    w.f64(g.y);
  }
  w.u64(s.m.size());
  for (double x : s.m) w.f64(x);
  for (double x : s.v) w.f64(x);
  w.raw(std::string_view(kEndMagic, 8));
  return w.bytes();
}

TrainState decode_checkpoint(std::vector<std::uint8_t> bytes) {
  ByteReader r(std::move(bytes));
  if (r.remaining() < 8 || r.raw(8) != std::string_view(kMagic, 8)) throw IoError("not a checkpoint file");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw IoError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                  std::to_string(kCheckpointVersion) + ")");
  MlpConfig c;
  c.n_layers = static_cast<int>(r.u32());
  c.width = static_cast<int>(r.u32());
  c.in_dim = static_cast<int>(r.u32());
  c.out_dim = static_cast<int>(r.u32());
  c.has_density_channel = r.u8() != 0;
  const std::uint8_t mode = r.u8();
  r.u16();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw IoError(std::string("corrupt checkpoint header: ") + e.what());
  }
  TrainState s;
  s.mode = mode == 0 ? Mode::LT : Mode::DT;
  s.norm.cx = r.f64();
  s.norm.cy = r.f64();
  s.norm.sx = r.f64();
  s.norm.sy = r.f64();
  s.dt_c = r.f64();
  s.epoch = r.i64();
  const std::uint32_t n_patches = r.u32();
  const std::uint64_t n_theta = r.u64();
  if (n_theta != c.parameter_count()) throw IoError("corrupt checkpoint: parameter count does not match header");
  if (n_theta * 8 > r.remaining()) throw IoError("unexpected end of data (truncated or corrupt file)");
  s.theta = MlpParams(c);
  for (double& x : s.theta.flat()) x = r.f64();
  if (static_cast<std::uint64_t>(n_patches) * 16 > r.remaining())
    throw IoError("unexpected end of data (truncated or corrupt file)");
  s.gamma.resize(n_patches);
  for (Vec2& g : s.gamma) {
    g.x = r.f64();
    g.y = r.f64();
  }
  const std::uint64_t n_mom = r.u64();
  if (n_mom != n_theta + 2ULL * n_patches) throw IoError("corrupt checkpoint: moment count mismatch");
  if (n_mom * 16 > r.remaining()) throw IoError("unexpected end of data (truncated or corrupt file)");
  s.m.resize(n_mom);
  s.v.resize(n_mom);
  for (double& x : s.m) x = r.f64();
  for (double& x : s.v) x = r.f64();
  if (r.remaining() < 8 || r.raw(8) != std::string_view(kEndMagic, 8))
    throw IoError("checkpoint trailer missing (truncated or corrupt file)");
  if (r.remaining() != 0) throw IoError("trailing bytes after checkpoint trailer");
  return s;
}

void checkpoint_save(const TrainState& state, const std::filesystem::path& path) {
  write_file_bytes(path, encode_checkpoint(state));
}

TrainState checkpoint_load(const std::filesystem::path& path) { return decode_checkpoint(read_file_bytes(path)); }

TrainState checkpoint_load(const std::filesystem::path& path, const MlpConfig& expected) {
  TrainState s = checkpoint_load(path);
  const MlpConfig& got = s.theta.config();
  if (!(got == expected))
    throw ShapeMismatchError("checkpoint network " + std::to_string(got.n_layers) + "x" + std::to_string(got.width) +
                             " (out " + std::to_string(got.total_outputs()) + ") does not match config " +
                             std::to_string(expected.n_layers) + "x" + std::to_string(expected.width) + " (out " +
                             std::to_string(expected.total_outputs()) + ")");
  return s;
}

}  // namespace ltpinn
