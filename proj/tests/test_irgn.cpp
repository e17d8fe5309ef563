#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "birgn/errors.hpp"
#include "birgn/irgn.hpp"
#include "birgn/noise.hpp"
#include "birgn/presets.hpp"
#include "birgn/synthetic.hpp"

using namespace birgn;
using Opt = PenaltyFunctional::Options;

TEST(StoppingIndices, HandComputedSequence) {
  // tau * delta = 2
  const auto idx = stopping_indices({5, 3, 1, 1}, 2.0, 1.0);
  EXPECT_EQ(idx.n1, 2);
  EXPECT_EQ(idx.n2, 2);
  EXPECT_EQ(idx.n3, 3);
}

TEST(StoppingIndices, AllZeroWhenStartingBelowThreshold) {
  const auto idx = stopping_indices({1, 7, 9}, 2.0, 1.0);
  EXPECT_EQ(idx, (StoppingIndices{0, 0, 0}));
}

TEST(StoppingIndices, AbsentWhenNeverSatisfied) {
  const auto idx = stopping_indices({5, 4, 3}, 2.0, 1.0);
  EXPECT_FALSE(idx.n1 || idx.n2 || idx.n3);
  const auto short_seq = stopping_indices({5, 3, 1}, 2.0, 1.0);
  EXPECT_EQ(short_seq.n1, 2);
  EXPECT_EQ(short_seq.n2, 2);
  EXPECT_FALSE(short_seq.n3.has_value());
}

TEST(StoppingIndices, AveragedRuleNeedsBothNeighbours) {
  // r_1 = 1.9 is below 2 but the average with r_0 = 5 is not.
  const auto idx = stopping_indices({5, 1.9, 1.5}, 2.0, 1.0);
  EXPECT_EQ(idx.n1, 1);
  EXPECT_EQ(idx.n2, 2);
  EXPECT_EQ(idx.n3, 2);
  EXPECT_EQ(idx.for_rule(3), 2);
  EXPECT_THROW(idx.for_rule(4), std::invalid_argument);
}

TEST(StoppingIndices, OrderingHoldsOnRandomSequences) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> r(1 + trial % 12);
    for (auto& v : r) v = u(rng);
    const auto idx = stopping_indices(r, 1.05, 1.0);
    if (idx.n2) {
      ASSERT_TRUE(idx.n1 && *idx.n1 <= *idx.n2);
    }
    if (idx.n3) {
      ASSERT_TRUE(idx.n2 && *idx.n2 <= *idx.n3);
    }
  }
}

TEST(StoppingConfig, Validation) {
  EXPECT_THROW((StoppingConfig{0, 1.05, 10}).validate(), std::invalid_argument);
  EXPECT_THROW((StoppingConfig{1, 1.0, 10}).validate(), std::invalid_argument);
  EXPECT_THROW((StoppingConfig{1, 1.05, -1}).validate(), std::invalid_argument);
  EXPECT_NO_THROW((StoppingConfig{3, 1.05, 0}).validate());
}

namespace {

struct RunSetup {
  Problem problem;
  Field data;
  PenaltyFunctional penalty;
};

RunSetup reaction_setup(double delta, std::uint64_t seed = 1, int n = 40) {
  Problem p = make_preset("reaction1d-paper", n);
  Field y = p.op->apply(p.truth);
  if (delta > 0) y = add_noise(y, delta, seed);
  PenaltyFunctional pen(Opt{}, p.initial_guess);
  return {std::move(p), std::move(y), std::move(pen)};
}

}  // namespace

TEST(Run, DiscrepancyPrincipleContract) {
  const double delta = 1e-3;
  const RunSetup s = reaction_setup(delta);
  const StoppingConfig stop{1, 1.05, 60};
  const RunResult res = run(*s.problem.op, s.penalty, s.data, delta, RegSchedule(1, 0.5), stop, s.problem.truth);
  ASSERT_EQ(res.stop_reason, StopReason::RuleSatisfied);
  ASSERT_TRUE(res.stop_index);
  const auto r = res.residuals();
  const int nd = *res.stop_index;
  EXPECT_EQ(static_cast<int>(r.size()), nd + 1);
  EXPECT_LE(r[nd], 1.05 * delta);
  for (int n = 0; n < nd; ++n) EXPECT_GT(r[n], 1.05 * delta);
  EXPECT_EQ(res.indices.n1, nd);
  EXPECT_LE(l2_norm(s.problem.op->apply(res.final_iterate) - s.data) - r[nd], 1e-14);
  for (std::size_t k = 0; k < res.records.size(); ++k) {
    EXPECT_EQ(res.records[k].n, static_cast<int>(k));
    EXPECT_EQ(res.records[k].alpha_n, std::ldexp(1.0, -static_cast<int>(k)));
    EXPECT_TRUE(res.records[k].error_to_truth.has_value());
  }
  EXPECT_EQ(res.records[0].inner_iterations, 0);
}

TEST(Run, NoiseFreeDataDrivesResidualDown) {
  const RunSetup s = reaction_setup(0.0);
  const double floor = 1e-12;
  const RunResult res = run(*s.problem.op, s.penalty, s.data, floor, RegSchedule(1, 0.5), {1, 1.05, 25});
  const auto r = res.residuals();
  EXPECT_LT(r.back(), 1e-5);
  EXPECT_LT(r.back(), 1e-3 * r.front());
  for (std::size_t k = 1; k < r.size(); ++k) EXPECT_LT(r[k], r[k - 1]);
  EXPECT_EQ(static_cast<int>(res.records.size()), 26);
  EXPECT_EQ(res.stop_reason, StopReason::MaxOuter);
  EXPECT_FALSE(res.stop_index.has_value());
}

TEST(Run, LargeNoiseStopsAtZeroForEveryRule) {
  const RunSetup s = reaction_setup(1e-3);
  for (int rule : {1, 2, 3}) {
    const RunResult res = run(*s.problem.op, s.penalty, s.data, 10.0, RegSchedule(1, 0.5), {rule, 1.05, 10});
    EXPECT_EQ(res.stop_index, 0) << "rule " << rule;
    EXPECT_EQ(res.records.size(), 1u);
    EXPECT_EQ(res.final_iterate.values(), s.problem.initial_guess.values());
  }
}

TEST(Run, IteratesStayInDiffusionDomain) {
  Problem p = make_preset("diffusion1d-paper", 50);
  const double delta = 1e-3;
  const Field y = add_noise(p.op->apply(p.truth), delta, 3);
  const PenaltyFunctional pen(Opt{}, p.initial_guess);
  const RunResult res = run(*p.op, pen, y, delta, RegSchedule(1, 0.5), {2, 1.05, 15});
  EXPECT_GE(res.final_iterate.values().minCoeff(), p.op->lower_bound());
}

TEST(Run, IsDeterministic) {
  const RunSetup s = reaction_setup(1e-3, 4);
  const StoppingConfig stop{3, 1.05, 30};
  const RunResult a = run(*s.problem.op, s.penalty, s.data, 1e-3, RegSchedule(1, 0.5), stop, s.problem.truth);
  const RunResult b = run(*s.problem.op, s.penalty, s.data, 1e-3, RegSchedule(1, 0.5), stop, s.problem.truth);
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(a.final_iterate.values(), b.final_iterate.values());
}

TEST(Run, RejectsBadInputs) {
  const RunSetup s = reaction_setup(1e-3);
  EXPECT_THROW(run(*s.problem.op, s.penalty, s.data, -1.0, RegSchedule(1, 0.5), {}), std::invalid_argument);
  const Field wrong(Grid::unit_interval(3));
  EXPECT_THROW(run(*s.problem.op, s.penalty, wrong, 1e-3, RegSchedule(1, 0.5), {}), GridMismatch);
}

TEST(ScalingCheck, ZeroOperatorIsAlwaysSatisfied) {
  const auto g = Grid::unit_interval(10);
  const DiagonalLinearOperator zero(Field(g, 0.0));
  const PenaltyFunctional pen(Opt{}, Field(g));
  const ScalingReport rep = scaling_check(zero, pen, RegSchedule(1e-6, 0.5));
  EXPECT_TRUE(rep.satisfied);
  EXPECT_EQ(rep.norm_estimate, 0.0);
  EXPECT_FALSE(rep.suggested_alpha0);
}

TEST(ScalingCheck, SuggestsNormToThePower) {
  const auto op = DiagonalLinearOperator::log_spaced(11, 2.0);
  Field sigma = op.singular_values();
  const auto g = sigma.grid();
  const DiagonalLinearOperator scaled(3.0 * sigma);
  const PenaltyFunctional pen(Opt{}, Field(g));
  const ScalingReport rep = scaling_check(scaled, pen, RegSchedule(1, 0.5), 2.0);
  EXPECT_NEAR(rep.norm_estimate, 3.0, 1e-6);
  EXPECT_FALSE(rep.satisfied);
  ASSERT_TRUE(rep.suggested_alpha0);
  EXPECT_NEAR(*rep.suggested_alpha0, 9.0, 1e-5);
  EXPECT_TRUE(scaling_check(scaled, pen, RegSchedule(10, 0.5), 2.0).satisfied);
}
