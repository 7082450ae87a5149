#include <gtest/gtest.h>

#include <limits>
#include <optional>
#include <sstream>

#include "fixtures.hpp"
#include "pedsched/lp_format.hpp"
#include "pedsched/milp_build.hpp"
#include "pedsched/milp_solver.hpp"

using namespace pedsched;
using namespace pedsched::testing;

TEST(Build, SingleIntervalStructure) {
  PedScenario s = hand_rolled_ped();
  s.steps = 1;
  const PedMilp milp = build_milp(s);
  const MilpModel& m = milp.model;
  int theta = 0, flows = 0, volumes = 0;
  for (const Variable& v : m.variables()) {
    theta += v.name.rfind("th_", 0) == 0;
    flows += v.name.rfind("f_", 0) == 0;
    volumes += v.name.rfind("P_", 0) == 0;
  }
  EXPECT_EQ(theta, 2);
  EXPECT_EQ(flows, 8);
  EXPECT_EQ(volumes, 4);
  EXPECT_EQ(m.variable_count(), 18);
  EXPECT_EQ(m.count(VarKind::Binary), 4);
  // delay objective: -15 per crossing plus 15 * initial volume.
  EXPECT_DOUBLE_EQ(m.objective().constant, 15.0 * (30 + 12 + 45 + 7));
  for (const Term& t : m.objective().terms) EXPECT_DOUBLE_EQ(t.coef, -15.0);
  EXPECT_GE(m.metadata().big_m, 30 + 12 + 45 + 7 + 5 + 8 + 3);
  EXPECT_GT(m.metadata().epsilon, 0.0);
}

TEST(Build, ObjectiveEqualsDelayOnTrace) {
  const PedScenario s = hand_rolled_ped();
  const PedMilp milp = build_milp(s);
  const Schedule sch = hand_rolled_schedule();
  const auto x = trace_assignment(milp, sch.theta(), simulate(s, sch));
  EXPECT_DOUBLE_EQ(milp.model.objective().value(x), 3330.0);
}

TEST(Build, RejectsShortInterval) {
  PedScenario s = hand_rolled_ped();
  s.delta = 10.0;
  EXPECT_THROW(build_milp(s), GeometryError);
}

TEST(Build, RejectsWaitingZoneLimit) {
  PedScenario s = hand_rolled_ped();
  s.geometry.waiting_zone_capacity = 50;
  EXPECT_THROW(build_milp(s), ValidationError);
}

TEST(Equivalence, EverySimulatedTraceIsFeasible) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const PedScenario s = random_ped(seed, 1, 5);
    const PedMilp milp = build_milp(s);
    for (unsigned mask = 0; mask < 32; ++mask) {
      const Schedule sch = schedule_from_mask(mask, 5);
      const auto report = check_trace(milp, sch.theta(), simulate(s, sch));
      EXPECT_TRUE(report.ok()) << "seed " << seed << " mask " << mask << " first "
                               << (report.ok() ? "" : report.violations[0].name);
    }
  }
}

TEST(Equivalence, KnownPriorStage) {
  PedScenario s = random_ped(11, 1, 4);
  s.junctions[0].prev_stage = Stage::Vertical;
  const PedMilp milp = build_milp(s);
  for (unsigned mask = 0; mask < 16; ++mask) {
    const Schedule sch = schedule_from_mask(mask, 4);
    EXPECT_TRUE(check_trace(milp, sch.theta(), simulate(s, sch)).ok()) << mask;
  }
}

TEST(Equivalence, MaximisingServedFlowReproducesSimulator) {
  const PedScenario s = random_ped(3, 1, 5);
  const PedMilp milp = build_milp(s);
  for (unsigned mask = 0; mask < 32; mask += 5) {
    const Schedule sch = schedule_from_mask(mask, 5);
    const PedTrace t = simulate(s, sch);
    const MilpSolution sol = maximize_served_flow(milp, sch);
    ASSERT_EQ(sol.status, SolveStatus::Optimal);
    for (int k = 0; k < 5; ++k) {
      for (int st = 0; st < kStreamCount; ++st) {
        EXPECT_EQ(sol.values[static_cast<std::size_t>(milp.index.flow[milp.index.jks(0, k, st)])],
                  static_cast<double>(t.junctions[0].steps[static_cast<std::size_t>(k)].flow[static_cast<std::size_t>(st)]));
      }
    }
    EXPECT_DOUBLE_EQ(sol.objective, delay_cost(t));
  }
}

TEST(FaultInjection, InflatedFlowTripsOnlyCapacityRows) {
  PedScenario s;
  s.steps = 2;
  PedJunctionDemand d;
  d.initial = {200, 200, 200, 200};
  d.arrivals.assign(2, CornerCounts{});
  d.alpha.assign(2, CornerRatios{0.5, 0.5, 0.5, 0.5});
  d.gamma.assign(2, CornerRatios{0.0, 0.0, 0.0, 0.0});
  s.junctions.push_back(d);
  const Schedule sch(1, 2);
  PedTrace t = simulate(s, sch);
  PedStep& last = t.junctions[0].steps[1];
  ASSERT_EQ(last.flow[0], 74);
  last.flow[0] += 1;
  // Keep the volume update consistent so only the bound rows see the fault.
  t.junctions[0].final_volume =
      step_volumes(last.volume, last.flow, d.arrivals[1], d.gamma[1]);

  const PedMilp milp = build_milp(s);
  const auto report = check_trace(milp, sch.theta(), t);
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].family, "flowcap");
}

TEST(FaultInjection, DoubleGreenTripsOnlyStageRow) {
  const PedScenario s = hand_rolled_ped();
  const Schedule sch = hand_rolled_schedule();
  ThetaBits theta = sch.theta();
  theta.at(0, 4, Stage::Vertical) = 1;
  const auto report = check_trace(build_milp(s), theta, simulate(s, sch));
  EXPECT_EQ(report.families(), std::vector<std::string>{"stage"});
  EXPECT_EQ(report.violations.size(), 1u);
}

TEST(LpFormat, RoundTripAndDeterminism) {
  const PedMilp milp = build_milp(random_ped(5, 1, 4));
  std::ostringstream a, b;
  write_lp(a, milp.model);
  write_lp(b, milp.model);
  EXPECT_EQ(a.str(), b.str());
  std::istringstream in(a.str());
  const MilpModel back = read_lp(in);
  EXPECT_TRUE(back == milp.model);
  EXPECT_EQ(back.metadata(), milp.model.metadata());
  std::ostringstream c;
  write_lp(c, back);
  EXPECT_EQ(a.str(), c.str());
}

TEST(LpFormat, EmptyModelParses) {
  std::ostringstream os;
  write_lp(os, MilpModel{});
  std::istringstream in(os.str());
  const MilpModel back = read_lp(in);
  EXPECT_EQ(back.variable_count(), 0);
  EXPECT_EQ(back.constraint_count(), 0);
}

TEST(LpFormat, MalformedTextIsValidationError) {
  std::istringstream in("Minimize\n obj: + 1 x\nSubject To\n c1: + 1 x <=\nEnd\n");
  EXPECT_THROW(read_lp(in), ValidationError);
}

TEST(ReferenceSolver, SmallLp) {
  // max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3
  MilpModel m;
  const int x = m.add_variable("x", VarKind::Continuous, 0, 3);
  const int y = m.add_variable("y", VarKind::Continuous, 0, kInfinity);
  m.add_constraint("a_1", {{x, 1}, {y, 1}}, RowSense::LessEqual, 4);
  m.add_constraint("b_1", {{x, 1}, {y, 3}}, RowSense::LessEqual, 6);
  m.objective() = {false, {{x, 3}, {y, 2}}, 0.0};
  const auto sol = solve_lp(m);
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_NEAR(sol.objective, 11.0, 1e-9);
}

TEST(ReferenceSolver, Knapsack) {
  // max 5a + 4b + 3c, 2a + 3b + c <= 5, 4a + b + 2c <= 11, 3a + 4b + 2c <= 8
  MilpModel m;
  const int a = m.add_variable("a", VarKind::Integer, 0, 10);
  const int b = m.add_variable("b", VarKind::Integer, 0, 10);
  const int c = m.add_variable("c", VarKind::Integer, 0, 10);
  m.add_constraint("r_1", {{a, 2}, {b, 3}, {c, 1}}, RowSense::LessEqual, 5);
  m.add_constraint("r_2", {{a, 4}, {b, 1}, {c, 2}}, RowSense::LessEqual, 11);
  m.add_constraint("r_3", {{a, 3}, {b, 4}, {c, 2}}, RowSense::LessEqual, 8);
  m.objective() = {false, {{a, 5}, {b, 4}, {c, 3}}, 0.0};
  const auto sol = solve_milp(m);
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  EXPECT_DOUBLE_EQ(sol.objective, 13.0);
}

TEST(ReferenceSolver, Infeasible) {
  MilpModel m;
  const int x = m.add_variable("x", VarKind::Integer, 0, 10);
  const int y = m.add_variable("y", VarKind::Integer, 0, 10);
  m.add_constraint("r_1", {{x, 2}, {y, 2}}, RowSense::Equal, 3);
  EXPECT_EQ(solve_milp(m).status, SolveStatus::Infeasible);
}

namespace {
double enumerated_optimum(const PedScenario& s) {
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1U << s.steps); ++mask) {
    best = std::min(best, delay_cost(simulate(s, schedule_from_mask(mask, s.steps))));
  }
  return best;
}
}  // namespace

// The rows only cap each crossing count from above, so the program may hold
// pedestrians back; its optimum is a lower bound on the simulated optimum.
TEST(Optimum, NeverAboveEnumeratedSimulatorOptimum) {
  int equal = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const PedScenario s = random_ped(seed, 1, 3);
    const PedMilp milp = build_milp(s);
    const auto sol = solve_milp(milp.model);
    ASSERT_EQ(sol.status, SolveStatus::Optimal) << seed;
    EXPECT_TRUE(check_assignment(milp.model, sol.values).ok());
    const double best = enumerated_optimum(s);
    EXPECT_LE(sol.objective, best + 1e-6) << seed;
    equal += sol.objective == best;
  }
  EXPECT_GE(equal, 5);
}

TEST(Optimum, StrictGapComesFromWithheldCrossings) {
  const PedScenario s = random_ped(6, 1, 3);
  const PedMilp milp = build_milp(s);
  const auto sol = solve_milp(milp.model);
  ASSERT_EQ(sol.status, SolveStatus::Optimal);
  ASSERT_LT(sol.objective, enumerated_optimum(s));

  // Replay the program's stage choice in the simulator: some crossing must
  // fall short of min(capacity, floor(P * eta)).
  Schedule sch(1, 3);
  for (int k = 0; k < 3; ++k) {
    const double h = sol.values[static_cast<std::size_t>(milp.index.theta[milp.index.jko(0, k, Stage::Horizontal)])];
    sch.set(0, k, h > 0.5 ? Stage::Horizontal : Stage::Vertical);
  }
  bool withheld = false;
  CornerCounts volume = s.junctions[0].initial;
  std::optional<Stage> prev;
  const PedModel model(s.geometry, s.delta);
  for (int k = 0; k < 3 && !withheld; ++k) {
    for (Corner i = 0; i < kCornerCount; ++i) {
      const Stage o = sch.at(0, k);
      const Count full = hopping_flow(volume[static_cast<std::size_t>(i)], s.junctions[0].ratio(k, i, o),
                                      model.capacity_for(prev, o), true);
      const double got = sol.values[static_cast<std::size_t>(milp.index.flow[milp.index.jks(0, k, stream_id(o, i))])];
      if (got < static_cast<double>(full)) withheld = true;
    }
    for (Corner i = 0; i < kCornerCount; ++i) {
      volume[static_cast<std::size_t>(i)] = static_cast<Count>(
          sol.values[static_cast<std::size_t>(milp.index.volume[milp.index.jki(0, k, i)])]);
    }
    prev = sch.at(0, k);
  }
  EXPECT_TRUE(withheld);
}
