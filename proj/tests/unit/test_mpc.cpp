#include <gtest/gtest.h>

#include <sstream>

#include "pedsched/mpc.hpp"

using namespace pedsched;

namespace {

Scenario plant(std::uint64_t seed, int rows, int cols, int intervals) {
  GeneratorSpec g;
  g.seed = seed;
  g.rows = rows;
  g.cols = cols;
  g.steps = 1;
  g.demand_intervals = intervals;
  return generate_scenario(g);
}

}  // namespace

TEST(Mpc, PlantStateMatchesDirectSimulation) {
  const Scenario s = plant(3, 2, 2, 8);
  MpcOptions o;
  o.horizon = 3;
  const MpcRun run = run_mpc(s, o);
  ASSERT_EQ(run.steps.size(), 8u);
  const Scenario full = plant_for(s, 8);
  const PedTrace pt = simulate(full.ped, run.applied);
  EXPECT_EQ(delay_units(pt), run.ped_units());
  for (int j = 0; j < 4; ++j) {
    EXPECT_EQ(pt.junctions[static_cast<std::size_t>(j)].final_volume,
              run.final_ped_volume[static_cast<std::size_t>(j)]);
  }
  const GridNetwork net(full.grid);
  const VehTrace vt = simulate_veh(net, *full.veh, run.applied_veh);
  EXPECT_EQ(vt.final_volume, run.final_veh_volume);
  EXPECT_EQ(vehicle_delay_units(vt), run.veh_units());
  EXPECT_TRUE(joint_feasible(run.applied, run.applied_veh, s.coupling));
}

TEST(Mpc, OneStepHorizonIsGreedy) {
  const Scenario s = plant(5, 1, 2, 6);
  MpcOptions o;
  o.horizon = 1;
  const MpcRun run = run_mpc(s, o);

  // Independent greedy loop over the plant simulator.
  const PedModel model(s.ped.geometry, s.ped.delta);
  for (int j = 0; j < 2; ++j) {
    const PedJunctionDemand& d = s.ped.junctions[static_cast<std::size_t>(j)];
    CornerCounts vol = d.initial;
    std::optional<Stage> prev = d.prev_stage;
    for (int k = 0; k < 6; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      Stage best = Stage::Horizontal;
      Count best_units = -1;
      for (Stage o2 : {Stage::Horizontal, Stage::Vertical}) {
        CornerCounts v = vol;
        const Count u =
            model.advance(v, prev, o2, d.arrivals[ku], d.alpha[ku], d.gamma[ku]).delay_units();
        if (best_units < 0 || u < best_units) {
          best_units = u;
          best = o2;
        }
      }
      EXPECT_EQ(run.applied.at(j, k), best) << "junction " << j << " interval " << k;
      model.advance(vol, prev, best, d.arrivals[ku], d.alpha[ku], d.gamma[ku]);
      prev = best;
    }
  }
}

TEST(Mpc, NoWorseThanFixedStagesUnderStationaryDemand) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Scenario s = plant(seed, 1, 1, 10);
    PedJunctionDemand& d = s.ped.junctions[0];
    for (std::size_t k = 1; k < d.arrivals.size(); ++k) {
      d.arrivals[k] = d.arrivals[0];
      d.alpha[k] = d.alpha[0];
      d.gamma[k] = d.gamma[0];
    }
    MpcOptions o;
    o.horizon = 4;
    const MpcRun run = run_mpc(s, o);
    const Scenario full = plant_for(s, 10);
    for (Stage fixed : {Stage::Horizontal, Stage::Vertical}) {
      EXPECT_LE(run.ped_units(), delay_units(simulate(full.ped, Schedule(1, 10, fixed))))
          << "seed " << seed;
    }
  }
}

TEST(Mpc, WindowsPastTheSeriesHoldLastDemand) {
  const Scenario s = plant(2, 1, 2, 3);
  MpcOptions o;
  o.horizon = 5;
  EXPECT_EQ(run_mpc(s, o).steps.size(), 3u);
  o.intervals = 4;
  EXPECT_THROW(run_mpc(s, o), ValidationError);
}

TEST(Mpc, DeterministicAndReproducibleFromRecordedState) {
  const Scenario s = plant(7, 2, 2, 6);
  MpcOptions o;
  o.horizon = 2;
  o.objective = MpcObjective::Unhappiness;
  const MpcRun a = run_mpc(s, o);
  const MpcRun b = run_mpc(s, o);
  EXPECT_EQ(a.applied, b.applied);

  // Restart from the plant state after two applied intervals.
  Scenario tail = s;
  const Scenario full = plant_for(s, 2);
  Schedule head(4, 2);
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 2; ++k) head.set(j, k, a.applied.at(j, k));
  }
  const PedTrace pt = simulate(full.ped, head);
  for (std::size_t j = 0; j < 4; ++j) {
    PedJunctionDemand& d = tail.ped.junctions[j];
    d.initial = pt.junctions[j].final_volume;
    d.prev_stage = a.applied.at(static_cast<int>(j), 1);
    d.arrivals.erase(d.arrivals.begin(), d.arrivals.begin() + 2);
    d.alpha.erase(d.alpha.begin(), d.alpha.begin() + 2);
    d.gamma.erase(d.gamma.begin(), d.gamma.begin() + 2);
  }
  tail.veh.reset();
  const MpcRun c = run_mpc(tail, o);
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) EXPECT_EQ(c.applied.at(j, k), a.applied.at(j, k + 2));
  }
}

TEST(Mpc, WeightedAndNoisyRuns) {
  const Scenario s = plant(4, 2, 2, 4);
  MpcOptions o;
  o.horizon = 2;
  o.objective = MpcObjective::Weighted;
  o.weight = Weight::integer(3);
  const MpcRun w = run_mpc(s, o);
  EXPECT_TRUE(w.certified);
  EXPECT_TRUE(joint_feasible(w.applied, w.applied_veh, s.coupling));

  o.objective = MpcObjective::Delay;
  o.noise = 0.5;
  const MpcRun n1 = run_mpc(s, o);
  const MpcRun n2 = run_mpc(s, o);
  EXPECT_EQ(n1.applied, n2.applied);
  const PedTrace pt = simulate(plant_for(s, 4).ped, n1.applied);
  EXPECT_EQ(delay_units(pt), n1.ped_units());

  o.noise = 1.5;
  EXPECT_THROW(run_mpc(s, o), ValidationError);
}

TEST(Mpc, OutputsAreStable) {
  const Scenario s = plant(1, 1, 2, 3);
  MpcOptions o;
  const MpcRun run = run_mpc(s, o);
  std::ostringstream csv, summary;
  write_applied_csv(csv, run, s.grid.delta);
  write_mpc_summary(summary, run, o, s.grid.delta);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')),
            "junction,interval,ped_stage,veh_stage,ped_delay,veh_delay");
  EXPECT_NE(summary.str().find("\"steps\""), std::string::npos);
  std::ostringstream again;
  write_applied_csv(again, run_mpc(s, o), s.grid.delta);
  EXPECT_EQ(again.str(), csv.str());
}
