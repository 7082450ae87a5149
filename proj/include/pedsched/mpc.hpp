#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "pedsched/dhs_solver.hpp"
#include "pedsched/exact_solver.hpp"
#include "pedsched/integration.hpp"
#include "pedsched/scenario_io.hpp"

namespace pedsched {

enum class MpcObjective { Delay, Unhappiness, Weighted };

const char* to_string(MpcObjective o);
MpcObjective parse_mpc_objective(const std::string& s);

struct MpcOptions {
  int horizon = 2;    // N, intervals per window
  int intervals = 0;  // T, applied intervals; 0 means the plant's demand length
  MpcObjective objective = MpcObjective::Delay;
  Weight weight;
  JointSolver solver = JointSolver::Exact;
  DhsParams dhs;
  std::uint64_t seed = 1;
  /// Predicted arrivals are scaled by (1 + noise * U[-1, 1]); 0 disables.
  double noise = 0.0;
  std::uint64_t noise_seed = 1;
  int threads = 0;
  UnhappinessOptions unhappiness;
  IntegrationOptions integration;

  void validate() const;
};

struct MpcStep {
  int interval = 0;
  std::vector<Stage> ped_stages;  // per junction
  Count ped_units = 0;            // realized pedestrian delay of this interval
  Count veh_units = 0;            // realized vehicle delay (0 without vehicles)
  double window_cost = 0.0;       // optimized objective of the window
};

struct MpcRun {
  int horizon = 0;
  Schedule applied;  // pedestrian stages, junctions x T
  Schedule applied_veh;
  std::vector<MpcStep> steps;
  std::vector<CornerCounts> final_ped_volume;
  std::vector<Count> final_veh_volume;
  bool has_vehicles = false;
  bool certified = true;

  Count ped_units() const;
  Count veh_units() const;
};

/// Receding horizon: solve the window starting at each interval from the
/// current plant state, apply its first interval to the plant, repeat.
/// Windows reaching past the demand series hold its last value.
MpcRun run_mpc(const Scenario& plant, const MpcOptions& options);

/// Plant scenario with the horizon set to T so whole-run simulations can be
/// compared against the applied schedule.
Scenario plant_for(const Scenario& plant, int intervals);

/// junction,interval,ped_stage,veh_stage,ped_delay,veh_delay
void write_applied_csv(std::ostream& out, const MpcRun& run, double delta);

/// Run summary as JSON: parameters, seeds, solver and per-step cost.
void write_mpc_summary(std::ostream& out, const MpcRun& run, const MpcOptions& options,
                       double delta);

}  // namespace pedsched
