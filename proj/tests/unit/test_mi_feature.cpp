#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ibgb/errors.hpp"
#include "ibgb/mi_feature.hpp"

using namespace ibgb;

namespace {

LatentBatch random_batch(int dim, int n, Rng& rng, double spread = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.3, 1.5);
  LatentBatch b;
  b.mu.resize(dim, n);
  b.sigma.resize(dim, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < dim; ++r) {
      b.mu(r, c) = spread * g(rng);
      b.sigma(r, c) = u(rng);
    }
  return b;
}

std::vector<int> cyclic_labels(int n, int classes) {
  std::vector<int> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = i % classes;
  return y;
}

}  // namespace

TEST(FeatureMi, SharedLatentGivesZero) {
  LatentBatch b;
  b.mu = Eigen::MatrixXd::Constant(3, 12, 0.7);
  b.sigma = Eigen::MatrixXd::Constant(3, 12, 0.4);
  Rng rng(1);
  const auto s = estimate_feature_mi_all(b, cyclic_labels(12, 3), 3, 16, rng);
  EXPECT_NEAR(s.mc, 0.0, 1e-9);
  EXPECT_NEAR(s.jensen, 0.0, 1e-9);
  EXPECT_NEAR(s.mc_conditional, 0.0, 1e-9);
  EXPECT_NEAR(s.jensen_conditional, 0.0, 1e-9);
}

TEST(FeatureMi, JensenDominatesOnSharedSamples) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Rng gen(seed);
    const auto b = random_batch(2 + static_cast<int>(seed % 3), 20, gen, 0.5 + 0.2 * static_cast<double>(seed % 5));
    Rng rng(seed + 100);
    const auto s = estimate_feature_mi_all(b, cyclic_labels(20, 4), 4, 8, rng);
    EXPECT_GE(s.jensen, s.mc);
    EXPECT_GE(s.jensen_conditional, s.mc_conditional);
  }
}

TEST(FeatureMi, McBoundedByLogSampleSize) {
  Rng gen(2), rng(3);
  const auto b = random_batch(2, 30, gen, 50.0);
  const auto s = estimate_feature_mi_all(b, cyclic_labels(30, 3), 3, 8, rng);
  EXPECT_LE(s.mc, std::log(30.0) + 1e-12);
  EXPECT_LE(s.mc_conditional, std::log(10.0) + 1e-12);
  EXPECT_NEAR(s.mc, std::log(30.0), 1e-3);
}

TEST(FeatureMi, PermutationInvariant) {
  Rng gen(4);
  const auto b = random_batch(3, 15, gen);
  const auto y = cyclic_labels(15, 3);
  std::vector<Eigen::MatrixXd> noise;
  Rng nr(5);
  std::normal_distribution<double> g;
  for (int j = 0; j < 6; ++j) {
    Eigen::MatrixXd e(3, 15);
    for (Eigen::Index i = 0; i < e.size(); ++i) e.data()[i] = g(nr);
    noise.push_back(e);
  }
  std::vector<int> perm(15);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[2], perm[9]);
  LatentBatch pb = b;
  std::vector<int> py(15);
  std::vector<Eigen::MatrixXd> pnoise = noise;
  for (int i = 0; i < 15; ++i) {
    pb.mu.col(i) = b.mu.col(perm[static_cast<std::size_t>(i)]);
    pb.sigma.col(i) = b.sigma.col(perm[static_cast<std::size_t>(i)]);
    py[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    for (int j = 0; j < 6; ++j) pnoise[static_cast<std::size_t>(j)].col(i) = noise[static_cast<std::size_t>(j)].col(perm[static_cast<std::size_t>(i)]);
  }
  const auto a = estimate_feature_mi_all(b, y, 3, noise);
  const auto c = estimate_feature_mi_all(pb, py, 3, pnoise);
  EXPECT_NEAR(a.mc, c.mc, 1e-12);
  EXPECT_NEAR(a.jensen, c.jensen, 1e-10);
  EXPECT_NEAR(a.mc_conditional, c.mc_conditional, 1e-12);
  EXPECT_NEAR(a.jensen_conditional, c.jensen_conditional, 1e-10);
}

TEST(FeatureMi, SingleEstimateMatchesSet) {
  Rng gen(6);
  const auto b = random_batch(2, 10, gen);
  const auto y = cyclic_labels(10, 2);
  Rng r1(7), r2(7);
  const auto all = estimate_feature_mi_all(b, y, 2, 5, r1);
  const auto one = estimate_feature_mi(b, y, 2, MiEstimator::jensen, true, 5, r2, 4);
  EXPECT_DOUBLE_EQ(one.value, all.jensen_conditional);
  EXPECT_EQ(one.layer, 4);
  EXPECT_EQ(one.k, 5);
  EXPECT_TRUE(one.conditional);
  EXPECT_EQ(one.estimator, MiEstimator::jensen);
}

TEST(FeatureMi, EmptyClassIsNamed) {
  Rng gen(8), rng(9);
  const auto b = random_batch(2, 6, gen);
  try {
    estimate_feature_mi_all(b, {0, 0, 1, 1, 0, 1}, 3, 2, rng);
    FAIL() << "expected InvalidArgument";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("class 2"), std::string::npos);
  }
}

TEST(SigmaAdaptive, ScalesWithMaxActivation) {
  const Eigen::MatrixXd f = Eigen::MatrixXd::Constant(2, 3, 1.0);
  const auto s = select_sigma_adaptive({f, 4.0 * f, Eigen::MatrixXd::Zero(2, 3)}, 1e-3);
  EXPECT_NEAR(s.sigma[0] * s.sigma[0], 1e-3, 1e-15);
  EXPECT_NEAR(s.sigma[1] * s.sigma[1], 4e-3, 1e-15);
  EXPECT_EQ(s.sigma[2], 1e-6);
  EXPECT_EQ(s.method, SigmaMethod::adaptive);
}

TEST(SigmaMle, DefaultGrid) {
  const auto g = default_sigma_grid();
  ASSERT_EQ(g.size(), 16u);
  EXPECT_NEAR(g.front(), 1e-4, 1e-18);
  EXPECT_NEAR(g.back(), 1.0, 1e-12);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], g[1] / g[0], 1e-9);
  Rng rng(1);
  EXPECT_THROW(select_sigma_mle({Eigen::MatrixXd::Zero(1, 3)}, {}, 2, rng), InvalidArgument);
}

TEST(SigmaMle, SingleLayerIsUnconstrainedArgmax) {
  Rng gen(10);
  Eigen::MatrixXd f(2, 25);
  std::normal_distribution<double> g;
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = g(gen);
  const std::vector<double> grid{1e-3, 1e-2, 1e-1, 1.0};
  Rng rng(11);
  const auto s = select_sigma_mle({f}, grid, 4, rng);
  double best = -1e300, arg = 0;
  for (double v : grid) {
    Rng r(11);
    const double ll = mixture_log_likelihood(LatentBatch::kernel(f, std::sqrt(v)), 4, r);
    if (ll > best) {
      best = ll;
      arg = std::sqrt(v);
    }
  }
  EXPECT_DOUBLE_EQ(s.sigma[0], arg);
  EXPECT_TRUE(s.warnings.empty());
}

TEST(SigmaMle, IdenticalLayersGiveNonIncreasingMi) {
  Rng gen(12);
  Eigen::MatrixXd f(3, 20);
  std::normal_distribution<double> g;
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = g(gen);
  Rng rng(13);
  const auto s = select_sigma_mle({f, f}, default_sigma_grid(), 4, rng);
  EXPECT_TRUE(s.warnings.empty());
  EXPECT_GE(s.mi[0], s.mi[1]);
}

TEST(Binning, SingleSymbolIsZero) {
  EXPECT_EQ(binned_mi(Eigen::MatrixXd::Constant(4, 10, 2.0)), 0.0);
}

TEST(Binning, DistinctTuplesGiveLogN) {
  Eigen::MatrixXd f(1, 10);
  for (int i = 0; i < 10; ++i) f(0, i) = i;
  EXPECT_NEAR(binned_mi(f, 10), std::log(10.0), 1e-12);
  // With labels, each class holds 5 distinct symbols.
  std::vector<int> y(10);
  for (int i = 0; i < 10; ++i) y[static_cast<std::size_t>(i)] = i % 2;
  EXPECT_NEAR(binned_mi(f, 10, y), std::log(5.0), 1e-12);
}

TEST(Binning, RepeatedInputsRemoveNoise) {
  const std::vector<long long> sym{0, 1, 0, 1};
  EXPECT_NEAR(plugin_mi(sym, std::nullopt, std::vector<long long>{0, 0, 1, 1}), 0.0, 1e-15);
  EXPECT_NEAR(plugin_mi(sym, std::nullopt, std::vector<long long>{0, 1, 0, 1}), std::log(2.0), 1e-15);
}

TEST(Binning, EdgesUseLayerRange) {
  Eigen::MatrixXd f(2, 3);
  f << 0.0, 0.5, 1.0,  //
      0.0, 0.0, 0.0;
  // The maximum falls in the last bin.
  EXPECT_EQ(bin_symbols(f, 2), (std::vector<long long>{0, 1, 1}));
  EXPECT_THROW(bin_symbols(f, 1), InvalidArgument);
}
