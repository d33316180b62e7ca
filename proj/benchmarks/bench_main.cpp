#include <benchmark/benchmark.h>

#include "ltpinn/config.hpp"
#include "ltpinn/experiment.hpp"

using namespace ltpinn;

namespace {

std::vector<Vec2> points(std::size_t n) { return uniform_grid({-1, 1, -1, 1}, n, n); }

MlpParams net(int layers, int width) {
  MlpConfig c;
  c.n_layers = layers;
  c.width = width;
  c.out_dim = 3;
  return he_init(c, 1);
}

void BM_JetsForward(benchmark::State& state) {
  const MlpParams p = net(5, static_cast<int>(state.range(0)));
  const auto x = points(16);
  const auto norm = InputNormalizer::from_roi({-1, 1, -1, 1});
  BatchedJets b;
  for (auto _ : state) {
    b.forward(p, norm, x, DerivOrder::Hessian);
    benchmark::DoNotOptimize(b.output(channel::kXX).data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(x.size()));
}
BENCHMARK(BM_JetsForward)->Arg(32)->Arg(64)->Arg(128);

void BM_JetsForwardBackward(benchmark::State& state) {
  const MlpParams p = net(5, static_cast<int>(state.range(0)));
  const auto x = points(16);
  const auto norm = InputNormalizer::from_roi({-1, 1, -1, 1});
  BatchedJets b;
  std::vector<Eigen::MatrixXd> adj(6, Eigen::MatrixXd::Ones(3, static_cast<Eigen::Index>(x.size())));
  std::vector<double> g(p.size());
  for (auto _ : state) {
    b.forward(p, norm, x, DerivOrder::Hessian);
    std::fill(g.begin(), g.end(), 0.0);
    b.backward(p, adj, g, {});
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(x.size()));
}
BENCHMARK(BM_JetsForwardBackward)->Arg(32)->Arg(64)->Arg(128);

void BM_PresetLossGradient(benchmark::State& state, const char* preset) {
  const Experiment e = build_experiment(ExperimentConfig::from(Config(preset)));
  const TrainState s = initial_state(e);
  const LossEvaluator loss = make_loss(e);
  Gradients g;
  for (auto _ : state) benchmark::DoNotOptimize(loss.evaluate(s.theta, s.gamma, &g).total);
}
BENCHMARK_CAPTURE(BM_PresetLossGradient, annulus_lt, "annulus-lt")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PresetLossGradient, rearrange_4, "rearrange-4")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PresetLossGradient, ns_2c, "ns-2c")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
