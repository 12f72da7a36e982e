#include "onehop/diagnostics.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "onehop/experiments.hpp"

using namespace onehop;

namespace {

const Pool kSym = Pool::constant_product(100.0, 100.0);

struct Run {
  std::vector<Pool> pools;
  double x;
  SolveResult<double> result;
  OracleResult<double> oracle;
};

Run run(std::vector<Pool> pools, double x, SolverConfig<double> cfg = {}) {
  Run r{std::move(pools), x, {}, {}};
  r.result = solve<double>(r.pools, x, cfg);
  r.oracle = solve_exact<double>(r.pools, x);
  return r;
}

Run table_run(double s) {
  const auto inst = build_instance(s);
  return run(inst.pools, inst.amount_in, inst.config());
}

}  // namespace

TEST(Objective, Examples) {
  const std::vector<Pool> pools = {kSym, kSym};
  Allocation<double> a{Vector<double>(2), 100.0};
  a.amounts << 50.0, 50.0;
  EXPECT_NEAR(objective<double>(pools, a), 200.0 / 3.0, 1e-12);
  a.amounts << 100.0, 0.0;
  EXPECT_DOUBLE_EQ(objective<double>(pools, a), 50.0);
  Allocation<double> zero{Vector<double>::Zero(2), 0.0};
  EXPECT_EQ(objective<double>(pools, zero), 0.0);
}

TEST(CheckImprovement, TwoSymmetricPools) {
  const auto r = run({kSym, kSym}, 100.0);
  ASSERT_EQ(r.result.trace.size(), 1u);
  const auto& round0 = r.result.trace[0];
  EXPECT_DOUBLE_EQ(round0.gap_g, 0.75);
  EXPECT_NEAR(round0.improvement, 50.0 / 3.0, 1e-12);

  const auto series = check_improvement(r.result.trace, 0.02, r.oracle.objective);
  ASSERT_EQ(series.size(), 1u);
  EXPECT_DOUBLE_EQ(series[0].rhs, 5.2734375);
  EXPECT_TRUE(series[0].pass);
  EXPECT_TRUE(all_pass(series));
}

TEST(CheckImprovement, EmptyTraceIsVacuous) {
  const auto series = check_improvement(Trace{}, 0.02, 1.0);
  EXPECT_TRUE(series.empty());
  EXPECT_TRUE(all_pass(series));
  EXPECT_FALSE(first_failure(series));
}

TEST(CheckImprovement, FlagsAnUndersizedStep) {
  Trace trace(1);
  trace[0].gap_g = 0.75;
  trace[0].improvement = 5.0;
  const auto series = check_improvement(trace, 0.02, 66.0);
  EXPECT_FALSE(series[0].pass);
  EXPECT_EQ(first_failure(series), 0u);
}

TEST(CheckGradientEstimate, TwoSymmetricPools) {
  const auto r = run({kSym, kSym}, 100.0);
  const auto series = check_gradient_estimate(r.result.trace, 0.0025, 2, r.oracle.objective);
  ASSERT_EQ(series.size(), 1u);
  EXPECT_TRUE(series[0].applicable);
  // sqrt(0.0025 * (50/3) / 4).
  EXPECT_NEAR(series[0].rhs, 0.10206207261596575, 1e-15);
  EXPECT_TRUE(series[0].pass);
}

TEST(CheckGradientEstimate, ConstantSumIsNotApplicable) {
  const std::vector<Pool> pools = {kSym, Pool::constant_sum(0.5, 10.0)};
  const auto r = run(pools, 100.0);
  const auto k = global_kappa<double>(pools, 100.0);
  EXPECT_EQ(k.mu, 0.0);
  const auto series = check_gradient_estimate(r.result.trace, k.mu, 2, r.oracle.objective);
  for (const auto& c : series) EXPECT_FALSE(c.applicable);

  const auto rate = check_linear_rate(r.result, k, r.oracle.objective);
  EXPECT_FALSE(rate.applicable);
}

TEST(CheckLinearRate, TwoSymmetricPools) {
  const std::vector<Pool> pools = {kSym, kSym};
  const auto r = run(pools, 100.0);
  const auto k = global_kappa<double>(pools, 100.0);
  EXPECT_EQ(k.rounded(), 8);
  const auto rate = check_linear_rate(r.result, k, r.oracle.objective);
  EXPECT_DOUBLE_EQ(rate.contraction_bound, 1.0 - 3.0 / 512.0);
  ASSERT_EQ(rate.rounds.size(), 2u);
  // k = 0 anchors the envelope at h0.
  EXPECT_EQ(rate.rounds[0].lhs, rate.rounds[0].rhs);
  EXPECT_TRUE(rate.rounds[0].pass);
  EXPECT_NEAR(rate.rounds[1].lhs, 0.0, 1e-12);
  EXPECT_GT(rate.rounds[1].slack, 16.0);
  EXPECT_TRUE(all_pass(rate.rounds));
}

TEST(CheckNestedIntervals, TwoSymmetricPools) {
  const auto r = run({kSym, kSym}, 100.0);
  ASSERT_EQ(r.result.trace.size(), 1u);
  EXPECT_DOUBLE_EQ(r.result.trace[0].marginal_donor, 0.25);
  EXPECT_DOUBLE_EQ(r.result.trace[0].marginal_receiver, 1.0);
  EXPECT_NEAR(r.result.final_marginal_donor, 4.0 / 9.0, 1e-15);
  EXPECT_NEAR(r.result.final_marginal_receiver, 4.0 / 9.0, 1e-15);
  EXPECT_TRUE(all_pass(check_nested_intervals(r.result)));
}

TEST(CheckNestedIntervals, DetectsAWideningInterval) {
  SolveResult<double> fake;
  fake.trace.resize(1);
  fake.trace[0].marginal_donor = 0.4;
  fake.trace[0].marginal_receiver = 0.5;
  fake.final_marginal_donor = 0.3;
  fake.final_marginal_receiver = 0.5;
  const auto series = check_nested_intervals(fake);
  EXPECT_EQ(first_failure(series), 1u);
}

TEST(CheckSandwich, LambdaStarInsideEveryInterval) {
  const std::vector<Pool> pools = {kSym, Pool::constant_product(400.0, 400.0), Pool::constant_product(50.0, 30.0)};
  const auto r = run(pools, 100.0);
  EXPECT_TRUE(all_pass(check_sandwich(pools, r.result, r.oracle.lambda_star)));
  EXPECT_FALSE(all_pass(check_sandwich(pools, r.result, 2.0)));
}

TEST(CheckLegitimacyFeasible, EveryRound) {
  const auto r = table_run(10);
  const auto series = check_legitimacy_feasible(r.pools, r.result);
  EXPECT_EQ(series.size(), r.result.trace.size());
  EXPECT_TRUE(all_pass(series));
}

TEST(ReplayAllocations, EndsAtFinalAllocation) {
  const auto r = table_run(5);
  const auto states = replay_allocations(r.result);
  ASSERT_EQ(states.size(), r.result.trace.size() + 1);
  EXPECT_EQ(states.back().amounts, r.result.allocation.amounts);
  for (const auto& s : states) EXPECT_TRUE(exactly_feasible(s));
}

class TableInstance : public ::testing::TestWithParam<double> {};

TEST_P(TableInstance, AllBoundsHold) {
  const auto r = table_run(GetParam());
  const auto report = analyze(r.pools, r.x, r.result, r.oracle);
  EXPECT_TRUE(report.all_pass()) << report.first_violation()->first;
  EXPECT_GT(report.improvement.checked, 0);
  EXPECT_EQ(report.rows.size(), r.result.trace.size());
  EXPECT_LT(report.empirical_contraction, report.contraction_bound);
}

INSTANTIATE_TEST_SUITE_P(Scales, TableInstance, ::testing::Values(2.0, 10.0, 100.0, 1000.0));

TEST(Analyze, RandomInstancesPassEveryCheck) {
  for (std::uint64_t seed = 1000; seed < 1200; ++seed) {
    const auto inst = random_instance(seed);
    const auto r = run(inst.pools, inst.amount_in, inst.config());
    const auto report = analyze(r.pools, r.x, r.result, r.oracle);
    ASSERT_TRUE(report.all_pass()) << "seed " << seed << ": " << report.first_violation()->first << " at round "
                                   << report.first_violation()->second;
  }
}

TEST(Analyze, GreedyInitAlsoPasses) {
  SolverConfig<double> cfg;
  cfg.init = InitStrategy::marginal_greedy(7);
  for (std::uint64_t seed = 1; seed < 50; ++seed) {
    const auto inst = random_instance(seed);
    const auto r = run(inst.pools, inst.amount_in, cfg);
    ASSERT_TRUE(analyze(r.pools, r.x, r.result, r.oracle).all_pass()) << "seed " << seed;
  }
}
