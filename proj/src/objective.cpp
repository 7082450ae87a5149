#include "pedsched/objective.hpp"

namespace pedsched {

const char* to_string(PedObjective o) {
  return o == PedObjective::Delay ? "delay" : "unhappiness";
}

PedObjective parse_ped_objective(const std::string& s) {
  if (s == "delay") return PedObjective::Delay;
  if (s == "unhappiness") return PedObjective::Unhappiness;
  throw ValidationError("unknown pedestrian objective '" + s + "'");
}

double junction_cost(const PedScenario& scenario, int j, std::span<const Stage> stages,
                     PedObjective objective, const UnhappinessOptions& opts) {
  const JunctionTrace t = simulate_junction(scenario, j, stages);
  if (objective == PedObjective::Delay) {
    return static_cast<double>(delay_units(t)) * scenario.delta;
  }
  return junction_unhappiness(scenario.junctions[static_cast<std::size_t>(j)], t, stages,
                              scenario.delta, opts);
}

double network_cost(const PedScenario& scenario, const Schedule& schedule, PedObjective objective,
                    const UnhappinessOptions& opts) {
  if (schedule.junctions() != scenario.junction_count()) {
    throw ValidationError("schedule shape does not match the pedestrian scenario");
  }
  double total = 0.0;
  for (int j = 0; j < schedule.junctions(); ++j) {
    total += junction_cost(scenario, j, schedule.junction(j), objective, opts);
  }
  return total;
}

}  // namespace pedsched
