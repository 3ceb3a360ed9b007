#include <benchmark/benchmark.h>

#include "ibgb/analysis.hpp"
#include "ibgb/mi_feature.hpp"
#include "ibgb/stochastic_mlp.hpp"

using namespace ibgb;

namespace {

MlpShape paper_shape(int scale) {
  MlpShape s;
  s.widths = {32 * scale, 32 * scale, 16 * scale, 16 * scale};
  s.n_classes = 5;
  return s;
}

void BM_PairwiseLogDensity(benchmark::State& state) {
  const auto n = state.range(0);
  Rng rng(1);
  std::normal_distribution<double> g;
  const Eigen::MatrixXd mu = Eigen::MatrixXd::NullaryExpr(16, n, [&] { return g(rng); });
  const Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(16, n, 0.7);
  const Eigen::MatrixXd z = Eigen::MatrixXd::NullaryExpr(16, n, [&] { return g(rng); });
  for (auto _ : state) benchmark::DoNotOptimize(pairwise_log_density(mu, sigma, z));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_PairwiseLogDensity)->Arg(50)->Arg(500)->Arg(2000);

void BM_LossAndGrads(benchmark::State& state) {
  const MlpShape s = paper_shape(static_cast<int>(state.range(0)));
  Rng rng(2);
  const auto p = MlpParams::init(s, rng);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(50, 2) * 3;
  std::vector<int> y(50);
  for (int i = 0; i < 50; ++i) y[static_cast<std::size_t>(i)] = i % 5;
  const auto noise = draw_noise(s, 50, 8, rng);
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_grads(p, x, y, noise, 1.0));
}
BENCHMARK(BM_LossAndGrads)->Arg(1)->Arg(8);

void BM_FeatureMi(benchmark::State& state) {
  const auto n = state.range(0);
  Rng rng(3);
  std::normal_distribution<double> g;
  LatentBatch b;
  b.mu = Eigen::MatrixXd::NullaryExpr(16, n, [&] { return g(rng); });
  b.sigma = Eigen::MatrixXd::Constant(16, n, 0.5);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = static_cast<int>(i % 5);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_feature_mi_all(b, y, 5, 64, rng));
}
BENCHMARK(BM_FeatureMi)->Arg(50)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_KendallTauB(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  std::normal_distribution<double> g;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = g(rng);
    y[i] = x[i] + g(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(kendall_tau_b(x, y));
  state.SetComplexityN(static_cast<long>(n));
}
BENCHMARK(BM_KendallTauB)->RangeMultiplier(4)->Range(256, 65536)->Complexity(benchmark::oNLogN);

}  // namespace
BENCHMARK_MAIN();
