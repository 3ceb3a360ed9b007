#include <gtest/gtest.h>

#include "ibgb/analysis.hpp"
#include "ibgb/rng.hpp"
#include "support/reference.hpp"

using namespace ibgb;

namespace {

void fill(std::vector<double>& v, Rng& rng, bool ties) {
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> level(0, 9);
  for (auto& x : v) x = ties ? static_cast<double>(level(rng)) : g(rng);
}

}  // namespace

class CorrelationOracle : public ::testing::TestWithParam<bool> {};

TEST_P(CorrelationOracle, MatchesDefinitions) {
  Rng rng(GetParam() ? 11 : 12);
  std::vector<double> x(1000), y(1000);
  for (int rep = 0; rep < 5; ++rep) {
    fill(x, rng, GetParam());
    fill(y, rng, GetParam());
    for (std::size_t i = 0; i < y.size(); i += 3) y[i] = x[i];  // some dependence
    EXPECT_NEAR(pearson(x, y), reference::pearson(x, y), 1e-12);
    EXPECT_NEAR(spearman(x, y), reference::spearman(x, y), 1e-12);
    EXPECT_NEAR(kendall_tau_b(x, y), reference::kendall_tau_b(x, y), 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Ties, CorrelationOracle, ::testing::Bool());
