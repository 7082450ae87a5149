#include <gtest/gtest.h>

#include <sstream>

#include "pedsched/exact_solver.hpp"
#include "pedsched/integration.hpp"
#include "pedsched/scenario_io.hpp"

using namespace pedsched;

namespace {

Scenario coupled(std::uint64_t seed, int rows, int cols, int steps) {
  GeneratorSpec g;
  g.seed = seed;
  g.rows = rows;
  g.cols = cols;
  g.steps = steps;
  return generate_scenario(g);
}

WeightedProblem problem(const Scenario& s, IntegrationOptions o = {}) {
  return WeightedProblem(s.ped, *s.veh, s.coupling, o);
}

}  // namespace

TEST(WeightValue, ParseAndPrint) {
  EXPECT_EQ(Weight::parse("2"), Weight::integer(2));
  EXPECT_EQ(Weight::parse("0.25").to_string(), "0.25");
  EXPECT_EQ(Weight::parse("5/4").to_string(), "1.25");
  EXPECT_EQ((Weight{1, 3}).to_string(), "1/3");
  EXPECT_EQ(Weight::midpoint(Weight::integer(3), Weight::integer(4)).to_string(), "3.5");
  EXPECT_TRUE(Weight::parse("0.5") < Weight::parse("3/4"));
  EXPECT_THROW(Weight::parse("-1"), ValidationError);
  EXPECT_THROW(Weight::parse("x"), ValidationError);
  EXPECT_THROW(Weight::parse("1/0"), ValidationError);
}

TEST(Feasibility, DefaultPairing) {
  const StageCoupling c = StageCoupling::parallel();
  Schedule ped(1, 1), veh(1, 1);
  EXPECT_TRUE(joint_feasible(ped, veh, c));
  veh.set(0, 0, Stage::Vertical);
  EXPECT_FALSE(joint_feasible(ped, veh, c));
}

TEST(Feasibility, RelaxedAllowsAllRed) {
  StageCoupling c = StageCoupling::parallel();
  ThetaBits ped(1, 1), veh(1, 1);
  EXPECT_FALSE(joint_feasible(ped, veh, c));
  c.mode = CouplingMode::Relaxed;
  EXPECT_TRUE(joint_feasible(ped, veh, c));
  ped.at(0, 0, Stage::Horizontal) = 1;
  EXPECT_FALSE(joint_feasible(ped, veh, c));  // lit stage outside any joint mode
  veh.at(0, 0, Stage::Horizontal) = 1;
  EXPECT_TRUE(joint_feasible(ped, veh, c));
  ped.at(0, 0, Stage::Vertical) = 1;
  veh.at(0, 0, Stage::Vertical) = 1;
  EXPECT_FALSE(joint_feasible(ped, veh, c));  // two joint modes at once
}

TEST(Problem, TableMatchesFreshSimulation) {
  const Scenario s = coupled(3, 2, 2, 3);
  const WeightedProblem p = problem(s);
  ASSERT_TRUE(p.tabulated());
  ASSERT_EQ(p.table().size(), 4096u);
  for (std::uint64_t r = 0; r < p.table().size(); r += 7) {
    const Schedule ped = p.ped_schedule(r);
    EXPECT_EQ(p.rank_of(ped), r);
    EXPECT_TRUE(joint_feasible(ped, p.veh_schedule(ped), p.coupling()));
    ASSERT_EQ(p.table()[r], p.evaluate(ped)) << "rank " << r;
  }
}

TEST(Problem, RejectsRelaxedSearchAndDegenerateScenarios) {
  Scenario s = coupled(1, 1, 1, 2);
  StageCoupling relaxed;
  relaxed.mode = CouplingMode::Relaxed;
  EXPECT_THROW(WeightedProblem(s.ped, *s.veh, relaxed), ValidationError);

  GeneratorSpec g;
  g.ped_initial = {0, 0};
  g.ped_arrivals = {0, 0};
  g.steps = 2;
  const Scenario empty = generate_scenario(g);
  EXPECT_THROW(problem(empty), ValidationError);
}

TEST(Scaling, RatiosAndWeightedSum) {
  const Scenario s = coupled(2, 1, 2, 3);
  const WeightedProblem p = problem(s);
  const JointCosts worst{p.ped_max_units(), p.veh_max_units()};
  EXPECT_DOUBLE_EQ(scaled_cost(p, worst, Weight::integer(0)).u_d, 1.0);
  EXPECT_DOUBLE_EQ(scaled_cost(p, worst, Weight::integer(2)).u_d, 3.0);
  const JointCosts half{p.ped_max_units(), 0};
  EXPECT_DOUBLE_EQ(scaled_cost(p, half, Weight::parse("0.25")).u_d, 0.25);
}

TEST(Solve, SingleJunctionMatchesBruteForce) {
  const Scenario s = coupled(5, 1, 1, 3);
  const WeightedProblem p = problem(s);
  for (const Weight& m : {Weight::integer(0), Weight::integer(1), Weight::parse("7.5")}) {
    const JointSolution sol = solve_weighted(p, m);
    double best = 1e300;
    for (unsigned mask = 0; mask < 8; ++mask) {
      Schedule ped(1, 3);
      for (int k = 0; k < 3; ++k) {
        ped.set(0, k, (mask >> (2 - k)) & 1U ? Stage::Vertical : Stage::Horizontal);
      }
      best = std::min(best, scaled_cost(p, p.evaluate(ped), m).u_d);
    }
    EXPECT_DOUBLE_EQ(scaled_cost(p, sol.costs, m).u_d, best);
    EXPECT_EQ(sol.costs, p.evaluate(sol.ped_schedule));
  }
}

TEST(Solve, BranchAndBoundMatchesTable) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Scenario s = coupled(seed, 2, 2, 3);
    const WeightedProblem tab = problem(s);
    IntegrationOptions o;
    o.max_joint_bits = 0;
    const WeightedProblem bnb = problem(s, o);
    ASSERT_FALSE(bnb.tabulated());
    EXPECT_EQ(bnb.ped_max_units(), tab.ped_max_units());
    EXPECT_EQ(bnb.veh_max_units(), tab.veh_max_units());
    EXPECT_TRUE(bnb.certified());
    for (int m : {0, 1, 3, 20}) {
      const JointSolution a = solve_weighted(tab, Weight::integer(m));
      const JointSolution b = solve_weighted(bnb, Weight::integer(m));
      EXPECT_EQ(a.ped_schedule, b.ped_schedule) << "seed " << seed << " m " << m;
      EXPECT_TRUE(b.certified);
    }
  }
}

TEST(Solve, NodeBudgetMarksResultUncertified) {
  const Scenario s = coupled(1, 2, 2, 3);
  IntegrationOptions o;
  o.max_joint_bits = 0;
  o.node_budget = 20;
  const WeightedProblem p = problem(s, o);
  EXPECT_FALSE(p.certified());
  EXPECT_FALSE(solve_weighted(p, Weight::integer(1)).certified);
}

TEST(Solve, HarmonySearchNeverBeatsExact) {
  const Scenario s = coupled(4, 2, 2, 3);
  const WeightedProblem p = problem(s);
  WeightedSolveOptions o;
  o.solver = JointSolver::Dhs;
  o.dhs.hms = 50;
  o.dhs.ni = 200;
  const Weight m = Weight::integer(2);
  const JointSolution h = solve_weighted(p, m, o);
  const JointSolution e = solve_weighted(p, m);
  EXPECT_FALSE(h.certified);
  EXPECT_GE(compare_weighted(p, h.costs, e.costs, m), 0);
}

TEST(Sweep, EndpointsAndStepStructure) {
  const Scenario s = coupled(1, 2, 2, 4);
  const WeightedProblem p = problem(s);
  SweepOptions o;
  o.refine = true;
  const SweepResult r = sweep_weights(p, integer_grid(64), o);

  const VehicleOptimum vo = vehicle_optimum(p.network(), p.veh());
  EXPECT_EQ(r.points.front().solution.costs.veh_units, vo.units);

  const Count ped_opt =
      std::llround(solve_exact_network(s.ped, PedObjective::Delay).cost / s.ped.delta);
  const SaturationPoint sat = saturation_weight(p);
  EXPECT_EQ(sat.costs.ped_units, ped_opt);
  for (const SweepPoint& pt : r.points) {
    const Weight& w = pt.solution.weight;
    if (static_cast<__int128>(w.num) * sat.weight.den > static_cast<__int128>(sat.weight.num) * w.den) {
      EXPECT_EQ(p.rank_of(pt.solution.ped_schedule), sat.rank);
    }
  }
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    const JointCosts& a = r.points[i - 1].solution.costs;
    const JointCosts& b = r.points[i].solution.costs;
    EXPECT_LE(a.veh_units, b.veh_units);
    EXPECT_GE(a.ped_units, b.ped_units);
    EXPECT_EQ(r.points[i].turning, r.points[i].sf_turning > 0.0);
  }
  EXPECT_EQ(r.turning_weights.size(), r.sf_at_turning.size());
}

TEST(Sweep, RefinementBracketsTurningWeights) {
  const Scenario s = coupled(2, 2, 2, 3);
  const WeightedProblem p = problem(s);
  SweepOptions o;
  o.refine = true;
  const SweepResult r = sweep_weights(p, integer_grid(16), o);
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    if (!r.points[i].turning) continue;
    const double gap = r.points[i].solution.weight.value() - r.points[i - 1].solution.weight.value();
    EXPECT_LE(gap, 0.25 + 1e-12);
  }
}

TEST(Sweep, GridValidation) {
  const Scenario s = coupled(1, 1, 1, 2);
  const WeightedProblem p = problem(s);
  EXPECT_THROW(sweep_weights(p, {Weight::integer(1)}), ValidationError);
  EXPECT_THROW(sweep_weights(p, {Weight::integer(0), Weight::integer(0)}), ValidationError);
}

TEST(Sweep, CsvColumns) {
  const Scenario s = coupled(1, 1, 2, 2);
  const WeightedProblem p = problem(s);
  std::ostringstream out;
  write_sweep_csv(out, sweep_weights(p, integer_grid(2)));
  const std::string csv = out.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "weight,U_D,P_D_ratio,V_D_ratio,schedule_hash,SF_turning");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(SwitchingFrequency, Profile) {
  Schedule constant(9, 3);
  EXPECT_EQ(switching_frequency_profile(constant), 0.0);
  Schedule alt(2, 4);
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 4; ++k) alt.set(j, k, k % 2 ? Stage::Vertical : Stage::Horizontal);
  }
  EXPECT_EQ(switching_frequency_profile(alt), 1.0);
  Schedule third(9, 3);
  for (int j = 0; j < 3; ++j) {
    third.set(j, 1, Stage::Vertical);
    third.set(j, 2, Stage::Vertical);
  }
  for (int j = 3; j < 6; ++j) third.set(j, 2, Stage::Vertical);
  EXPECT_DOUBLE_EQ(switching_frequency_profile(third), 1.0 / 3.0);
  EXPECT_THROW(switching_frequency_profile(Schedule(2, 1)), ValidationError);
}

TEST(SwitchingFrequency, Turning) {
  Schedule a(2, 2), b(2, 2, Stage::Vertical);
  EXPECT_EQ(switching_frequency_turning(a, a), 0.0);
  EXPECT_EQ(switching_frequency_turning(a, b), 1.0);
  EXPECT_THROW(switching_frequency_turning(a, Schedule(1, 2)), ValidationError);
}
