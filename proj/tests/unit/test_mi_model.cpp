#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ibgb/errors.hpp"
#include "ibgb/mi_model.hpp"

using namespace ibgb;

namespace {

SwagPosterior gaussian(const Eigen::VectorXd& mean, double var, std::vector<std::size_t> slices) {
  SwagPosterior p;
  p.mean = mean;
  p.var = Eigen::VectorXd::Constant(mean.size(), var);
  p.layer_slices = std::move(slices);
  return p;
}

}  // namespace

TEST(SwagDensity, ModeAndVarianceScaling) {
  const auto p = gaussian(Eigen::Vector3d(1, 2, 3), 1.0, {1, 3});
  EXPECT_NEAR(swag_log_density(p, Eigen::Vector3d(1, 2, 3), 2), -1.5 * std::log(2 * std::numbers::pi), 1e-13);
  EXPECT_NEAR(swag_log_density(p, Eigen::VectorXd::Constant(1, 1.0), 1), -0.5 * std::log(2 * std::numbers::pi), 1e-14);
  const auto q = gaussian(Eigen::Vector3d(1, 2, 3), 2.0, {1, 3});
  EXPECT_NEAR(swag_log_density(p, p.mean, 2) - swag_log_density(q, q.mean, 2), 1.5 * std::log(2.0), 1e-13);
  EXPECT_THROW(swag_log_density(p, Eigen::Vector2d(0, 0), 2), InvalidArgument);
}

TEST(ModelMi, IdenticalPosteriorsGiveZero) {
  const auto p = gaussian(Eigen::Vector4d(0.1, -0.2, 0.3, 0.5), 0.04, {2, 4});
  const PosteriorSet ps{{&p}, {&p}, {&p}};
  Rng rng(1);
  const auto v = estimate_model_mi_layers(ps, {}, rng);
  ASSERT_EQ(v.size(), 2u);
  for (double x : v) EXPECT_NEAR(x, 0.0, 1e-12);
}

TEST(ModelMi, DisjointPosteriorsApproachLogN) {
  const auto a = gaussian(Eigen::Vector2d(0, 0), 1e-4, {2});
  const auto b = gaussian(Eigen::Vector2d(10, 10), 1e-4, {2});
  Rng rng(2);
  const auto v = estimate_model_mi_layers({{&a}, {&b}}, {}, rng);
  // Jensen form replaces the log-mean mixture by a mean of logs, so it can
  // exceed ln 2; it must be at least ln 2 up to rounding.
  EXPECT_GE(v[0], std::log(2.0) - 1e-9);
  EXPECT_GT(v[0], 100.0);
  ModelMiOptions lme;
  lme.log_of_mean = true;
  Rng r2(2);
  EXPECT_NEAR(estimate_model_mi_layers({{&a}, {&b}}, lme, r2)[0], std::log(2.0), 1e-9);
}

TEST(ModelMi, RequiresTwoDatasetsAndMatchingSeeds) {
  const auto p = gaussian(Eigen::Vector2d(0, 0), 1.0, {2});
  Rng rng(3);
  EXPECT_THROW(estimate_model_mi_layers({{&p}}, {}, rng), InvalidArgument);
  ModelMiOptions sa;
  sa.variant = ModelMiVariant::seed_averaged;
  EXPECT_THROW(estimate_model_mi_layers({{&p, &p}, {&p}}, sa, rng), InvalidArgument);
  ModelMiOptions rs;
  rs.variant = ModelMiVariant::rescaled;
  EXPECT_THROW(estimate_model_mi_layers({{&p}, {&p}}, rs, rng), InvalidArgument);
}

TEST(ModelMi, DatasetPermutationInvariant) {
  const auto a = gaussian(Eigen::Vector3d(0, 0, 0), 0.5, {1, 3});
  const auto b = gaussian(Eigen::Vector3d(1, 0.5, 0), 0.3, {1, 3});
  const auto c = gaussian(Eigen::Vector3d(-1, 0, 2), 0.2, {1, 3});
  // Noise keyed on the posterior, not its position, so reordering reuses it.
  auto noise_for = [](const SwagPosterior* p) {
    return [p](Eigen::Index dim, int k) {
      Rng r(static_cast<std::uint64_t>(std::llround(100 * p->var(0))));
      std::normal_distribution<double> g;
      Eigen::MatrixXd e(dim, k);
      for (Eigen::Index i = 0; i < e.size(); ++i) e.data()[i] = g(r);
      return e;
    };
  };
  auto make_source = [&](const PosteriorSet& ps) -> NoiseSource {
    return [&ps, noise_for](std::size_t d, std::size_t g, Eigen::Index dim, int k) {
      return noise_for(ps[d][g])(dim, k);
    };
  };
  const PosteriorSet x{{&a}, {&b}, {&c}}, y{{&c}, {&a}, {&b}};
  const auto vx = estimate_model_mi_layers(x, {}, make_source(x));
  const auto vy = estimate_model_mi_layers(y, {}, make_source(y));
  for (std::size_t l = 0; l < vx.size(); ++l) EXPECT_NEAR(vx[l], vy[l], 1e-10);
}

TEST(ModelMi, SingleLayerEstimateMatchesSeries) {
  const auto a = gaussian(Eigen::Vector3d(0, 0, 0), 0.5, {1, 3});
  const auto b = gaussian(Eigen::Vector3d(1, 0.5, 0), 0.3, {1, 3});
  Rng r1(4), r2(4);
  const auto all = estimate_model_mi_layers({{&a}, {&b}}, {}, r1);
  const auto one = estimate_model_mi({{&a}, {&b}}, 2, {}, r2);
  EXPECT_DOUBLE_EQ(one.value, all[1]);
  EXPECT_EQ(one.n_datasets, 2);
  EXPECT_EQ(one.layer, 2);
}

TEST(Rescale, Examples) {
  const auto r = rescale_model_mi({2.0, 4.0}, {1.0, 1.0});
  EXPECT_NEAR(r[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r[1], 4.0 / 3.0, 1e-15);
  EXPECT_THROW(rescale_model_mi({0.0, 0.0}, {1.0}), RescaleUndefined);
  EXPECT_THROW(rescale_model_mi({}, {1.0}), InvalidArgument);
}

TEST(Rescale, PreservesRanksAndMatchesFeatureMean) {
  const std::vector<double> m{5e6, 1e6, 3e6, 2e6}, f{0.1, 0.9, 0.4};
  const auto r = rescale_model_mi(m, f);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) EXPECT_EQ(m[i] < m[j], r[i] < r[j]);
  double mean = 0;
  for (double v : r) mean += v / 4.0;
  EXPECT_NEAR(mean, (0.1 + 0.9 + 0.4) / 3.0, 1e-12);
}
