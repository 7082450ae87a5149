#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "pedsched/unhappiness.hpp"

using namespace pedsched;
using pedsched::testing::hand_rolled_ped;
using pedsched::testing::hand_rolled_schedule;

namespace {
std::vector<std::uint8_t> bits(std::initializer_list<int> v) {
  return {v.begin(), v.end()};
}
}  // namespace

TEST(RedRuns, PhiMarksEndOfEachRun) {
  // theta = 1 0 0 1 0 0 0
  const auto p = red_run_profile(bits({1, 0, 0, 1, 0, 0, 0}));
  EXPECT_EQ(p.phi, (std::vector<int>{0, 0, 2, 0, 0, 0, 3}));
  EXPECT_EQ(p.f, (std::vector<int>{0, 0, 1, 0, 0, 0, 1}));
}

TEST(RedRuns, AuxiliaryMarkersAgreeWithRunLengths) {
  const auto p = red_run_profile(bits({0, 0, 1, 1, 0, 1, 0, 0}));
  EXPECT_EQ(p.phi, (std::vector<int>{0, 2, 0, 0, 1, 0, 0, 2}));
  EXPECT_EQ(p.h, (std::vector<int>{0, 0, 2, 0, 4, 5, 6, 0, 8}));
  // q spreads the gaps between switch markers across the run starts.
  int q_total = 0;
  for (int q : p.q) q_total += q;
  EXPECT_EQ(q_total, 8);
}

TEST(RedRuns, AllGreenHasNoTerms) {
  const auto p = red_run_profile(bits({1, 1, 1}));
  EXPECT_EQ(p.phi, (std::vector<int>{0, 0, 0}));
}

TEST(RedRuns, AllRedIsOneRun) {
  const auto p = red_run_profile(bits({0, 0, 0, 0}));
  EXPECT_EQ(p.phi, (std::vector<int>{0, 0, 0, 4}));
}

TEST(Averaged, MeanOfBlockedDemandOverRun) {
  const std::vector<CornerCounts> volume = {{10, 0, 0, 0}, {20, 0, 0, 0}, {30, 0, 0, 0}};
  const std::vector<CornerRatios> eta(3, CornerRatios{0.5, 0.5, 0.5, 0.5});
  const auto th = bits({0, 0, 1});
  const std::vector<int> phi = {0, 2, 0};
  const auto pb = averaged_blocked(volume, eta, th, phi);
  EXPECT_DOUBLE_EQ(pb[1][0], 7.5);
  EXPECT_DOUBLE_EQ(pb[0][0], 0.0);
  EXPECT_DOUBLE_EQ(pb[2][0], 0.0);
}

TEST(Term, SaturationGuard) {
  UnhappinessOptions o;
  EXPECT_DOUBLE_EQ(unhappiness_term(2.0, 1, 15.0, o), 2.0 * std::exp(15.0));
  EXPECT_THROW(unhappiness_term(1.0, 47, 15.0, o), SaturationError);
  o.exponent_in_seconds = false;
  EXPECT_DOUBLE_EQ(unhappiness_term(1.0, 47, 15.0, o), std::exp(47.0));
}

TEST(HandRolled, MatchesIndependentOracle) {
  const PedScenario s = hand_rolled_ped();
  const Schedule sch = hand_rolled_schedule();
  const PedTrace t = simulate(s, sch);
  const double u = unhappiness_cost(s, t, sch);
  EXPECT_NEAR(u, 838888400120943.38, 838888400120943.38 * 1e-12);
}

TEST(Accumulator, BitwiseEqualToClosedForm) {
  const PedScenario s = hand_rolled_ped();
  const PedModel model(s.geometry, s.delta);
  for (unsigned mask = 0; mask < 32; ++mask) {
    Schedule sch(1, 5);
    for (int k = 0; k < 5; ++k) sch.set(0, k, (mask >> k) & 1U ? Stage::Vertical : Stage::Horizontal);
    const PedTrace t = simulate(s, sch);
    UnhappinessAccumulator acc(s.delta, {});
    for (int k = 0; k < 5; ++k) {
      acc.observe(sch.at(0, k), t.junctions[0].steps[static_cast<std::size_t>(k)].volume,
                  s.junctions[0].alpha[static_cast<std::size_t>(k)]);
    }
    acc.finish();
    EXPECT_EQ(acc.closed_cost(), unhappiness_cost(s, t, sch)) << "mask " << mask;
  }
}
