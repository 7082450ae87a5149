#pragma once

#include <span>
#include <string>

#include "pedsched/ped_dynamics.hpp"
#include "pedsched/unhappiness.hpp"

namespace pedsched {

enum class PedObjective { Delay, Unhappiness };

const char* to_string(PedObjective o);
/// Accepts "delay" and "unhappiness"; throws ValidationError otherwise.
PedObjective parse_ped_objective(const std::string& s);

/// Cost of one junction under `stages`: delay in pedestrian-seconds or the
/// unhappiness sum.
double junction_cost(const PedScenario& scenario, int j, std::span<const Stage> stages,
                     PedObjective objective, const UnhappinessOptions& opts = {});

/// Network cost: sum of junction costs in junction order.
double network_cost(const PedScenario& scenario, const Schedule& schedule, PedObjective objective,
                    const UnhappinessOptions& opts = {});

}  // namespace pedsched
