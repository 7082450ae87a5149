#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "pedsched/ped_dynamics.hpp"

using namespace pedsched;
using pedsched::testing::hand_rolled_ped;
using pedsched::testing::hand_rolled_schedule;

TEST(Capacity, CaseStudyValues) {
  const CrosswalkGeometry g;
  EXPECT_EQ(capacity(GreenPosition::First, g, 15.0), 23);
  EXPECT_EQ(capacity(GreenPosition::Continuing, g, 15.0), 74);
  EXPECT_EQ(capacity(1, true, g, 15.0), 23);
  EXPECT_EQ(capacity(2, false, g, 15.0), 23);
  EXPECT_EQ(capacity(2, true, g, 15.0), 74);
}

TEST(Capacity, NarrowCrosswalkUsesPerPersonRate) {
  CrosswalkGeometry g;
  g.width = 3.0;
  EXPECT_DOUBLE_EQ(clearance_rate(g), 1.0 / 0.27);
  EXPECT_EQ(capacity(GreenPosition::Continuing, g, 15.0), 55);
}

TEST(Capacity, IntervalTooShortIsGeometryError) {
  const CrosswalkGeometry g;
  EXPECT_THROW(capacity(GreenPosition::First, g, 10.0), GeometryError);
  EXPECT_THROW(PedModel(g, 10.0), GeometryError);
}

TEST(Flow, RedCarriesNothing) {
  EXPECT_EQ(hopping_flow(50, 0.5, 23, false), 0);
  EXPECT_EQ(hopping_flow(50, 0.5, 23, true), 23);
  EXPECT_EQ(hopping_flow(50, 0.29, 74, true), 14);
  EXPECT_EQ(hopping_flow(100, 0.29, 74, true), 29);
}

TEST(HandRolled, MatchesIndependentOracle) {
  const PedScenario s = hand_rolled_ped();
  const PedTrace t = simulate(s, hand_rolled_schedule());
  const JunctionTrace& jt = t.junctions.at(0);
  ASSERT_EQ(jt.steps.size(), 5u);

  const CornerCounts volume[] = {{30, 12, 45, 7}, {19, 24, 33, 7}, {27, 21, 21, 18},
                                 {25, 10, 25, 24}, {22, 31, 9, 27}};
  const CornerCounts out[] = {{18, 3, 23, 3}, {5, 16, 14, 6}, {12, 18, 13, 6},
                              {6, 6, 20, 3}, {11, 15, 4, 13}};
  const CornerCounts in[] = {{3, 18, 3, 23}, {16, 5, 6, 14}, {6, 13, 18, 12},
                             {3, 20, 6, 6}, {15, 11, 13, 4}};
  const CornerCounts dep[] = {{1, 3, 0, 23}, {5, 1, 4, 1}, {2, 7, 2, 0},
                              {0, 0, 5, 2}, {3, 3, 5, 2}};
  const Count cap[] = {23, 74, 23, 74, 23};
  for (std::size_t k = 0; k < 5; ++k) {
    const PedStep& st = jt.steps[k];
    EXPECT_EQ(st.volume, volume[k]) << "k=" << k;
    EXPECT_EQ(st.outflow, out[k]) << "k=" << k;
    EXPECT_EQ(st.inflow, in[k]) << "k=" << k;
    EXPECT_EQ(st.departures, dep[k]) << "k=" << k;
    EXPECT_EQ(st.capacity[static_cast<std::size_t>(index(st.stage))], cap[k]) << "k=" << k;
  }
  EXPECT_EQ(jt.final_volume, (CornerCounts{27, 28, 17, 20}));
  EXPECT_EQ(delay_units(t), 222);
  EXPECT_DOUBLE_EQ(delay_cost(t), 3330.0);
}

TEST(HandRolled, ConservationPerInterval) {
  const PedScenario s = hand_rolled_ped();
  const PedTrace t = simulate(s, hand_rolled_schedule());
  const auto& steps = t.junctions[0].steps;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    Count before = 0, after = 0, arrived = 0, left = 0;
    const CornerCounts& next = k + 1 < steps.size() ? steps[k + 1].volume : t.junctions[0].final_volume;
    for (int i = 0; i < kCornerCount; ++i) {
      before += steps[k].volume[i];
      after += next[i];
      arrived += s.junctions[0].arrivals[k][i];
      left += steps[k].departures[i];
    }
    EXPECT_EQ(after, before + arrived - left);
  }
}

TEST(PriorStage, ContinuingCapacityAtStart) {
  PedScenario s = hand_rolled_ped();
  s.junctions[0].prev_stage = Stage::Horizontal;
  const PedTrace t = simulate(s, hand_rolled_schedule());
  EXPECT_EQ(t.junctions[0].steps[0].capacity[0], 74);
  EXPECT_EQ(t.junctions[0].steps[0].outflow[2], 36);
}

TEST(Validation, RejectsBadRatios) {
  PedScenario s = hand_rolled_ped();
  s.junctions[0].alpha[1][2] = 1.5;
  EXPECT_THROW(s.validate(), ValidationError);
  s = hand_rolled_ped();
  s.junctions[0].gamma[0][0] = -0.1;
  EXPECT_THROW(s.validate(), ValidationError);
  s = hand_rolled_ped();
  s.junctions[0].arrivals.pop_back();
  EXPECT_THROW(s.validate(), ValidationError);
}

TEST(Csv, OneRowPerJunctionIntervalCorner) {
  const PedTrace t = simulate(hand_rolled_ped(), hand_rolled_schedule());
  std::ostringstream os;
  write_trace_csv(os, t, hand_rolled_schedule());
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "junction,interval,corner,volume,stage,capacity,flow_count,step_delay");
  std::getline(is, line);
  EXPECT_EQ(line, "0,1,1,30,H,23,18,180");
  int rows = 1;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 20);
}
