#include <gtest/gtest.h>

#include <cmath>

#include "ibgb/discrete.hpp"
#include "ibgb/errors.hpp"
#include "ibgb/information.hpp"

using namespace ibgb;

TEST(Entropy, KnownValues) {
  EXPECT_NEAR(entropy(Eigen::Vector4d::Constant(0.25), LogBase::bits), 2.0, 1e-15);
  EXPECT_NEAR(entropy(Eigen::Vector2d(1.0, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(entropy(Eigen::Vector3d(0.5, 0.25, 0.25), LogBase::bits), 1.5, 1e-15);
  EXPECT_THROW(entropy(Eigen::Vector2d(1.5, -0.5)), InvalidArgument);
}

TEST(MutualInformation, IndependentIsZeroAndCopyIsEntropy) {
  const Eigen::Vector2d a(0.3, 0.7);
  const Eigen::Vector3d b(0.2, 0.5, 0.3);
  EXPECT_NEAR(mutual_information(a * b.transpose()), 0.0, 1e-15);
  const Eigen::MatrixXd copy = Eigen::Vector3d(0.2, 0.5, 0.3).asDiagonal();
  EXPECT_NEAR(mutual_information(copy), entropy(b), 1e-15);
  EXPECT_NEAR(conditional_entropy(copy), 0.0, 1e-15);
}

TEST(EmpiricalEntropy, CountsSymbols) {
  const std::vector<long long> s{1, 1, 2, 3};
  EXPECT_NEAR(empirical_entropy(s), -(0.5 * std::log(0.5) + 2 * 0.25 * std::log(0.25)), 1e-15);
}

class DiscreteWorlds : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(DiscreteWorlds, ChainRuleOnEveryLayer) {
  DiscreteSpec spec;
  spec.seed = GetParam();
  spec.n_classes = 2 + static_cast<int>(GetParam() % 2);
  spec.hidden_sizes = {5, 3};
  spec.encoder_noise = (GetParam() % 3) * 0.2;
  const auto inst = gen_discrete_instance(spec);
  for (int h = 0; h < inst.n_hypotheses(); h += 3)
    for (int l = 1; l <= inst.depth() + 1; ++l) {
      const auto li = layer_information(inst, h, l);
      EXPECT_NEAR(li.i_xz - li.i_xz_given_y - li.i_yz, 0.0, 1e-10) << "h=" << h << " l=" << l;
      EXPECT_GE(li.i_xz_given_y, -1e-12);
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, DiscreteWorlds, ::testing::Range<std::uint64_t>(0, 12));

TEST(DiscreteInstance, SingleHypothesisHasNoEncoderInformation) {
  DiscreteSpec spec;
  spec.n_hypotheses = 1;
  spec.seed = 4;
  const auto inst = gen_discrete_instance(spec);
  for (int l = 1; l <= inst.depth() + 1; ++l) {
    const auto law = encoder_law(inst, l, 20);
    EXPECT_EQ(law.mutual_information(), 0.0);
    EXPECT_EQ(law.entropy, 0.0);
  }
}

TEST(DiscreteInstance, DeterministicEncoderHasNoResidualEntropy) {
  DiscreteSpec spec;
  spec.encoder_noise = 0.0;
  spec.seed = 5;
  const auto inst = gen_discrete_instance(spec);
  for (int h = 0; h < inst.n_hypotheses(); ++h) {
    EXPECT_EQ(layer_information(inst, h, 1).h_z_given_xy, 0.0);
    EXPECT_NEAR(layer_information(inst, h, 2).h_z_given_xy, 0.0, 1e-15);
  }
}

TEST(DiscreteInstance, NoisyEncoderHasResidualEntropy) {
  DiscreteSpec spec;
  spec.encoder_noise = 0.3;
  spec.seed = 5;
  const auto inst = gen_discrete_instance(spec);
  EXPECT_GT(layer_information(inst, 0, 2).h_z_given_xy, 1e-3);
  EXPECT_FALSE(inst.layer_deterministic(0, 2));
}

TEST(DiscreteInstance, RejectsOversizedSpecs) {
  DiscreteSpec spec;
  spec.nuisance_m = 4;
  spec.nuisance_levels = 3;  // 81 inputs per class
  EXPECT_THROW(gen_discrete_instance(spec), InvalidArgument);
  spec = DiscreteSpec{};
  spec.n_hypotheses = 5000;
  EXPECT_THROW(gen_discrete_instance(spec), InvalidArgument);
}

TEST(DiscreteInstance, ProbabilitiesAreNormalized) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    DiscreteSpec spec;
    spec.seed = seed;
    const auto inst = gen_discrete_instance(spec);
    EXPECT_NEAR(inst.y_prior.sum(), 1.0, 1e-12);
    for (int y = 0; y < inst.n_classes(); ++y) EXPECT_NEAR(inst.px_given_y.row(y).sum(), 1.0, 1e-12);
    for (int h = 0; h < inst.n_hypotheses(); ++h)
      for (int l = 1; l <= inst.depth() + 1; ++l) {
        const Eigen::MatrixXd e = inst.encoder(h, l);
        EXPECT_LT((e.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
      }
    const auto st = score_distribution(inst, 12);
    EXPECT_NEAR(st.sum(), 1.0, 1e-12);
    for (int b = 0; b < static_cast<int>(inst.rule.bucket_hypothesis.size()); ++b)
      EXPECT_NEAR(rule_distribution(inst, b).sum(), 1.0, 1e-12);
    const auto law = encoder_law(inst, inst.depth(), 12);
    EXPECT_NEAR(law.prob.sum(), 1.0, 1e-12);
    EXPECT_LE(law.conditional_entropy, law.entropy + 1e-12);
  }
}

TEST(DrawDiscrete, DeterministicAndInRange) {
  DiscreteSpec spec;
  spec.seed = 9;
  const auto inst = gen_discrete_instance(spec);
  Rng a(1), b(1);
  const auto s1 = draw_discrete(inst, 50, a);
  const auto s2 = draw_discrete(inst, 50, b);
  EXPECT_EQ(s1.x, s2.x);
  EXPECT_EQ(s1.y, s2.y);
  for (std::size_t i = 0; i < s1.x.size(); ++i) {
    EXPECT_GT(inst.px_given_y(s1.y[i], s1.x[i]), 0.0);
  }
}
