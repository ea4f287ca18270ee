#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mdpr/oracle.hpp"
#include "mdpr/solve.hpp"
#include "mdpr/transform.hpp"
#include "test_support.hpp"

namespace mdpr {
namespace {

FiniteMdp fix_a() {
  return FiniteMdp({"s0", "s1"}, {{{"a", {{1, 0.5}}, 1.0}}, {{"a", {{1, 0.4}}, 2.0}}});
}

TEST(Solvers, ValueAndPolicyIterationAgree) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> b(0.1, 0.95);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto m = testing::random_transient_mdp(seed, 6, 3, 1.0);
    const auto dp = direct_discounted(m, b(rng));
    const auto vi = value_iteration(dp, 1e-12);
    const auto pi = policy_iteration(dp, 1e-12);
    ASSERT_TRUE(vi.converged);
    ASSERT_TRUE(pi.converged);
    for (std::size_t x = 0; x < dp.mdp.num_states(); ++x) {
      EXPECT_NEAR(vi.value[x], pi.value[x], 1e-9 * std::max(1.0, pi.value[x])) << seed;
    }
  }
}

TEST(Solvers, PolicyIterationIsGreedyFixedPoint) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto m = testing::random_transient_mdp(seed);
    const auto dp = direct_discounted(m, 0.9);
    const auto pi = policy_iteration(dp);
    EXPECT_EQ(greedy_policy(dp, pi.value), pi.greedy_policy) << seed;
    const auto [dmin, dphi] = dcoe_residual(dp, pi.value, pi.greedy_policy);
    EXPECT_LE(dmin, 1e-12 * std::max(1.0, sup_norm(pi.value)));
    EXPECT_LE(dphi, 1e-12 * std::max(1.0, sup_norm(pi.value)));
  }
}

TEST(Solvers, GreedyBreaksTiesTowardLowestIndex) {
  FiniteMdp m({"x"}, {{{"a", {}, 1.0}, {"b", {}, 1.0}}});
  const auto dp = direct_discounted(m, 0.5);
  EXPECT_EQ(greedy_policy(dp, ValueVector{1.0, 0.0})[0], 0u);
}

TEST(Solvers, DiscountedMatchesOracleOnBetaScaledModel) {
  // The discounted optimum equals the total-cost optimum of q scaled by beta.
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto m = testing::random_transient_mdp(seed, 5, 3, 1.0);
    const double beta = 0.8;
    std::vector<std::vector<ActionRow>> rows(m.num_states());
    for (std::size_t x = 0; x < m.num_states(); ++x) {
      for (auto r : m.actions(x)) {
        for (auto& t : r.kernel) t.mass *= beta;
        rows[x].push_back(r);
      }
    }
    const auto orc = brute_force_optimum(FiniteMdp(m.state_labels(), rows), TotalCriterion{});
    const auto pi = policy_iteration(direct_discounted(m, beta));
    for (std::size_t x = 0; x < m.num_states(); ++x) {
      EXPECT_NEAR(pi.value[x], orc.best_value[x], 1e-9) << seed;
    }
  }
}

TEST(ValueIteration, StopsOnTailBound) {
  const auto dp = direct_discounted(fix_a(), 0.5);
  const auto vi = value_iteration(dp, 1e-10);
  EXPECT_TRUE(vi.converged);
  EXPECT_GT(vi.iterations, 1u);
  EXPECT_DOUBLE_EQ(vi.beta, 0.5);
  EXPECT_THROW(value_iteration(dp, 0.0), Error);
}

TEST(ValueIteration, ReportsNonConvergence) {
  const auto dp = direct_discounted(fix_a(), 0.999);
  const auto vi = value_iteration(dp, 1e-14, 3);
  EXPECT_FALSE(vi.converged);
  EXPECT_EQ(vi.iterations, 3u);
}

TEST(Residuals, TcoeOnFixture) {
  EXPECT_NEAR(tcoe_residual(fix_a(), ValueVector{8.0 / 3.0, 10.0 / 3.0}), 0.0, 1e-14);
  // Defects 1/6 at s0 and 0.2 at s1.
  EXPECT_NEAR(tcoe_residual(fix_a(), ValueVector{8.0 / 3.0, 3.0}), 0.2, 1e-14);
}

TEST(Residuals, AcoeRequiresStochasticKernel) {
  EXPECT_THROW(acoe_residual(fix_a(), 0.0, ValueVector{0.0, 0.0}), Error);
  FiniteMdp m({"x"}, {{{"stay", {{0, 1.0}}, 2.0}}});
  EXPECT_DOUBLE_EQ(acoe_residual(m, 2.0, ValueVector{5.0}), 0.0);
  EXPECT_DOUBLE_EQ(acoe_residual(m, 1.5, ValueVector{5.0}), 0.5);
}

}  // namespace
}  // namespace mdpr
