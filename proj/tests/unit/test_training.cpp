#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <gtest/gtest.h>

#include "ltpinn/io.hpp"
#include "ltpinn/training.hpp"

using namespace ltpinn;

namespace {

MlpConfig net(int layers = 2, int width = 5, int out = 1) {
  MlpConfig c;
  c.n_layers = layers;
  c.width = width;
  c.out_dim = out;
  return c;
}

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "ltpinn_training_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

// Laplace data fit with one patch and a Neumann ring.
LossEvaluator small_problem(double lambda_d = 1.0) {
  SampleSet s;
  s.roi = {-1.0, 1.0, -1.0, 1.0};
  s.core = {-0.9, 0.9, -0.9, 0.9};
  s.collocation = uniform_grid(s.core, 5, 5);
  for (const Vec2& p : uniform_grid(s.roi, 4, 4)) s.measurements.push_back({p, {0.3 * p.x - 0.1 * p.y}});
  const double radii[] = {0.5};
  s.boundary = sample_rings(CirclePatch{{0.1, 0.0}}, 0, radii, 8);
  LossSpec spec;
  spec.weights = {1.0, 1.0, lambda_d, 0.0};
  spec.bc.kind = BoundaryCondition::Kind::Neumann;
  spec.bc.q = -0.5;
  spec.beta = 20.0;
  return LossEvaluator(spec, s, InputNormalizer::from_roi(s.roi));
}

TrainState fresh_state(std::uint64_t seed = 1) {
  return make_state(he_init(net(), seed), InputNormalizer::from_roi({-1, 1, -1, 1}), Mode::LT, {{0.1, 0.0}});
}

}  // namespace

TEST(Training, FirstAdamStepMovesEveryParameterByLr) {
  TrainState s = fresh_state();
  const TrainState before = s;
  Gradients g;
  g.reset(s.theta.size(), 1);
  for (std::size_t i = 0; i < g.theta.size(); ++i) g.theta[i] = i % 2 ? 1.0 : -1.0;
  g.gamma[0] = {1.0, -1.0};
  AdamConfig cfg;
  cfg.lr = 1e-4;
  cfg.lr_gamma = 5e-4;
  adam_step(s, g, cfg);
  EXPECT_EQ(s.epoch, 1);
  // bias-corrected first step: lr * g / (|g| + eps)
  for (std::size_t i = 0; i < g.theta.size(); ++i) {
    const double moved = before.theta.flat()[i] - s.theta.flat()[i];
    EXPECT_LT(std::abs(std::abs(moved) - 1e-4), 1e-11);
    EXPECT_EQ(moved > 0, g.theta[i] > 0);
  }
  EXPECT_LT(std::abs((before.gamma[0].x - s.gamma[0].x) - 5e-4), 1e-11);
  EXPECT_LT(std::abs((before.gamma[0].y - s.gamma[0].y) + 5e-4), 1e-11);
  EXPECT_DOUBLE_EQ(s.m[0], -0.1);
  EXPECT_DOUBLE_EQ(s.v[0], 1e-3);
}

TEST(Training, ZeroGradientLeavesParametersUnchanged) {
  TrainState s = fresh_state();
  const TrainState before = s;
  Gradients g;
  g.reset(s.theta.size(), 1);
  adam_step(s, g, AdamConfig{});
  EXPECT_TRUE(s.theta == before.theta);
  EXPECT_EQ(s.gamma, before.gamma);
  EXPECT_EQ(s.epoch, 1);
}

TEST(Training, AdamRejectsBadGradients) {
  TrainState s = fresh_state();
  Gradients g;
  g.reset(s.theta.size(), 2);
  EXPECT_THROW(adam_step(s, g, AdamConfig{}), ConfigError);
  g.reset(s.theta.size(), 1);
  g.theta[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(adam_step(s, g, AdamConfig{}), NumericError);
  AdamConfig bad;
  bad.beta1 = 1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Training, EarlyStopWindow) {
  History h;
  const LossBreakdown b;
  for (int i = 0; i < 5; ++i) {
    const Vec2 g{1e-5 * i, 0.0};
    h.record(i, b, std::span<const Vec2>(&g, 1));
  }
  EXPECT_TRUE(early_stop_check(h, 5, 1e-4));
  EXPECT_FALSE(early_stop_check(h, 6, 1e-4));
  EXPECT_FALSE(early_stop_check(h, 5, 1e-5));
  const Vec2 jump{1.0, 0.0};
  h.record(5, b, std::span<const Vec2>(&jump, 1));
  EXPECT_FALSE(early_stop_check(h, 3, 1e-4));
  EXPECT_THROW(early_stop_check(h, 1, 1e-4), ConfigError);
}

TEST(Training, TrainingReducesLossAndLogsOnSchedule) {
  const LossEvaluator loss = small_problem();
  TrainState s = fresh_state();
  TrainOptions o;
  o.epochs = 200;
  o.log_interval = 50;
  o.adam.lr = 1e-2;
  std::vector<std::int64_t> logged;
  o.on_log = [&](std::int64_t e, const LossBreakdown&, const TrainState&) {
    logged.push_back(e);
    return true;
  };
  const auto r = train(s, loss, o);
  EXPECT_EQ(logged, (std::vector<std::int64_t>{0, 50, 100, 150, 200}));
  EXPECT_EQ(r.history.epochs, logged);
  EXPECT_EQ(s.epoch, 200);
  EXPECT_LT(r.history.losses.back().total, r.history.losses.front().total);
  // logged loss at epoch 0 is the loss of the initial state
  EXPECT_EQ(r.history.losses.front().total, loss.evaluate(fresh_state().theta, fresh_state().gamma).total);
}

TEST(Training, ZeroEpochsLogsInitialStateOnly) {
  const LossEvaluator loss = small_problem();
  TrainState s = fresh_state();
  TrainOptions o;
  const auto r = train(s, loss, o);
  EXPECT_EQ(r.history.size(), 1u);
  EXPECT_EQ(s.epoch, 0);
}

TEST(Training, EarlyStopEndsRun) {
  const LossEvaluator loss = small_problem();
  TrainState s = fresh_state();
  TrainOptions o;
  o.epochs = 1000;
  o.log_interval = 1;
  o.adam.lr = 1e-12;  // gamma practically frozen
  o.early_stop = true;
  o.early_stop_window = 4;
  const auto r = train(s, loss, o);
  EXPECT_TRUE(r.stopped_early);
  EXPECT_EQ(r.history.size(), 4u);
}

TEST(Training, DivergenceIsReported) {
  const LossEvaluator loss = small_problem(1e14);
  TrainState s = fresh_state();
  s.theta.bias(s.theta.layer_count() - 1)(0) = 1e3;
  TrainOptions o;
  o.epochs = 5;
  try {
    train(s, loss, o);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.epoch(), 0);
  }
}

TEST(Training, TrainingIsDeterministic) {
  const LossEvaluator loss = small_problem();
  TrainOptions o;
  o.epochs = 30;
  o.log_interval = 7;
  o.adam.lr = 1e-2;
  TrainState a = fresh_state(3);
  TrainState b = fresh_state(3);
  const auto ra = train(a, loss, o);
  const auto rb = train(b, loss, o);
  EXPECT_TRUE(a == b);
  ASSERT_EQ(ra.history.size(), rb.history.size());
  for (std::size_t i = 0; i < ra.history.size(); ++i) EXPECT_EQ(ra.history.losses[i].total, rb.history.losses[i].total);
}

TEST(Training, CheckpointRoundTripIsExact) {
  const LossEvaluator loss = small_problem();
  TrainState s = fresh_state(4);
  TrainOptions o;
  o.epochs = 3;
  o.adam.lr = 1e-2;
  train(s, loss, o);
  s.dt_c = -7.5;
  const auto path = temp_file("state.bin");
  checkpoint_save(s, path);
  const TrainState r = checkpoint_load(path);
  EXPECT_TRUE(r == s);
  EXPECT_EQ(encode_checkpoint(r), encode_checkpoint(s));
  EXPECT_TRUE(checkpoint_load(path, net()) == s);

  // resuming continues bit-for-bit
  TrainState x = s;
  TrainState y = r;
  train(x, loss, o);
  train(y, loss, o);
  EXPECT_TRUE(x == y);
}

TEST(Training, CheckpointErrors) {
  const TrainState s = fresh_state();
  const auto bytes = encode_checkpoint(s);
  EXPECT_THROW(decode_checkpoint({bytes.begin(), bytes.begin() + static_cast<long>(bytes.size() / 2)}), IoError);
  EXPECT_THROW(decode_checkpoint({bytes.begin(), bytes.end() - 1}), IoError);
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bad), IoError);
  auto future = bytes;
  future[8] = 2;
  EXPECT_THROW(decode_checkpoint(future), IoError);
  auto longer = bytes;
  longer.push_back(0);
  EXPECT_THROW(decode_checkpoint(longer), IoError);

  const auto path = temp_file("shape.bin");
  checkpoint_save(s, path);
  EXPECT_THROW(checkpoint_load(path, net(3, 5, 1)), ShapeMismatchError);
  EXPECT_THROW(checkpoint_load(temp_file("does_not_exist.bin")), IoError);
}
