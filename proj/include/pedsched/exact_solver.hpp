#pragma once

#include <functional>
#include <vector>

#include "pedsched/objective.hpp"

namespace pedsched {

struct ExactOptions {
  /// Largest horizon searched exhaustively per junction.
  int max_steps = 24;
  /// Joint (non-decomposed) enumeration limit in decision bits.
  int max_joint_bits = 20;
  /// Worker threads for network solves; 0 picks the hardware count.
  int threads = 0;
  UnhappinessOptions unhappiness;
};

struct JunctionSolution {
  std::vector<Stage> stages;
  double cost = 0.0;
  long nodes = 0;  // leaves for enumeration, visited nodes for branch-and-bound
};

struct NetworkSolution {
  Schedule schedule;
  double cost = 0.0;
  std::vector<double> junction_costs;
  long nodes = 0;
};

/// Scans all 2^N stage sequences of junction j in lexicographic order
/// (Horizontal first) and keeps the first strict improvement, so ties go to
/// the lexicographically smallest sequence.  Throws SolverGuardError past
/// options.max_steps.
JunctionSolution enumerate_junction(const PedScenario& scenario, int j, PedObjective objective,
                                    const ExactOptions& options = {});

/// Depth-first search, Horizontal branch first, pruning nodes whose
/// accumulated cost already reaches the incumbent.  Costs never decrease
/// along a prefix, so the result is the enumeration optimum with the same
/// tie-break.  `prune = false` visits every leaf.
JunctionSolution branch_and_bound_junction(const PedScenario& scenario, int j,
                                           PedObjective objective,
                                           const ExactOptions& options = {}, bool prune = true);

/// Per-junction optima concatenated; junctions are searched in parallel.
NetworkSolution solve_exact_network(const PedScenario& scenario, PedObjective objective,
                                    const ExactOptions& options = {});

/// Brute force over the joint space of all junctions together (no
/// decomposition).  Guarded by options.max_joint_bits.
NetworkSolution solve_joint_enumeration(const PedScenario& scenario, PedObjective objective,
                                        const ExactOptions& options = {});

/// Largest cost over all schedules (sum of per-junction maxima).
double maximize_cost(const PedScenario& scenario, PedObjective objective,
                     const ExactOptions& options = {});

/// Runs fn(j) for j in [0, count) on up to `threads` workers; exceptions
/// from workers are rethrown on the caller.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace pedsched
