#pragma once

#include <vector>

#include "pedsched/milp_build.hpp"
#include "pedsched/milp_model.hpp"

namespace pedsched {

/// Small dense reference solver: bound presolve, two-phase primal simplex
/// with Bland's rule, depth-first branch-and-bound.  Meant for checking the
/// generated programs on toy instances, not for production sizes.
struct MilpSolverOptions {
  long node_limit = 200000;
  double integrality_tolerance = 1e-6;
  double feasibility_tolerance = 1e-7;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, NodeLimit };
const char* to_string(SolveStatus s);

struct MilpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> values;
  long nodes = 0;
};

MilpSolution solve_milp(const MilpModel& model, const MilpSolverOptions& options = {});

/// LP relaxation of `model` (integrality dropped, bounds kept).
MilpSolution solve_lp(const MilpModel& model, const MilpSolverOptions& options = {});

/// Fixes the stage binaries to `schedule` and maximises the crossings of
/// each interval in turn, earliest first, freezing each interval's optimum
/// before moving on.  Returns the final assignment.
MilpSolution maximize_served_flow(const PedMilp& milp, const Schedule& schedule,
                                  const MilpSolverOptions& options = {});

}  // namespace pedsched
