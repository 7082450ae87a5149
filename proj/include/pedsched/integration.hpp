#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pedsched/dhs_solver.hpp"
#include "pedsched/objective.hpp"
#include "pedsched/veh_dynamics.hpp"

namespace pedsched {

/// Non-negative rational weight on the pedestrian term.  Kept exact so
/// weighted costs compare without rounding.
struct Weight {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  Weight reduced() const;
  std::string to_string() const;
  /// Decimal text ("2", "0.25") or a fraction ("5/4").
  static Weight parse(const std::string& s);
  static Weight integer(std::int64_t m) { return {m, 1}; }
  static Weight midpoint(const Weight& a, const Weight& b);

  friend bool operator==(const Weight& a, const Weight& b);
  friend bool operator<(const Weight& a, const Weight& b);
  friend bool operator<=(const Weight& a, const Weight& b) { return !(b < a); }
};

/// Pedestrian and vehicle delay of one joint schedule, in person- or
/// vehicle-intervals (multiply by delta for seconds).
struct JointCosts {
  Count ped_units = 0;
  Count veh_units = 0;

  friend bool operator==(const JointCosts&, const JointCosts&) = default;
};

struct IntegrationOptions {
  /// Joint spaces up to this many decisions are tabulated exhaustively.
  int max_joint_bits = 20;
  /// Node budget for branch-and-bound on larger spaces.
  long node_budget = 2'000'000;
  int threads = 0;
};

/// Weighted pedestrian/vehicle problem.  One joint decision per junction and
/// interval picks a pedestrian stage and the vehicle stage paired with it.
/// Decisions are ordered time-major (interval, then junction) with
/// Horizontal first; ties between equal weighted costs always go to the
/// earliest schedule in that order.
class WeightedProblem {
 public:
  WeightedProblem(PedScenario ped, VehScenario veh, StageCoupling coupling,
                  IntegrationOptions options = {});

  const PedScenario& ped() const { return ped_; }
  const VehScenario& veh() const { return veh_; }
  const GridNetwork& network() const { return net_; }
  const StageCoupling& coupling() const { return coupling_; }
  const IntegrationOptions& options() const { return options_; }
  int junctions() const { return ped_.junction_count(); }
  int steps() const { return ped_.steps; }
  int decisions() const { return junctions() * steps(); }

  /// Largest delays over the coupled schedule set.
  Count ped_max_units() const { return ped_max_; }
  Count veh_max_units() const { return veh_max_; }
  /// False when a maximum came from a budget-limited search.
  bool certified() const { return certified_; }
  /// True when every joint schedule's costs are tabulated.
  bool tabulated() const { return !table_.empty(); }
  const std::vector<JointCosts>& table() const { return table_; }

  /// Joint decision ranks map to (pedestrian, vehicle) schedules.
  Schedule ped_schedule(std::uint64_t rank) const;
  Schedule veh_schedule(const Schedule& ped_schedule) const;
  std::uint64_t rank_of(const Schedule& ped_schedule) const;

  /// Fresh simulation of both layers.
  JointCosts evaluate(const Schedule& ped_schedule) const;

 private:
  friend class JointSearch;

  PedScenario ped_;
  VehScenario veh_;
  GridNetwork net_;
  StageCoupling coupling_;
  IntegrationOptions options_;
  std::vector<JointCosts> table_;
  Count ped_max_ = 0;
  Count veh_max_ = 0;
  bool certified_ = true;
};

struct ScaledCost {
  double u_d = 0.0;
  double ped_ratio = 0.0;
  double veh_ratio = 0.0;
};

/// U_D = V_D / |V_D max| + m * P_D / |P_D max|.
ScaledCost scaled_cost(const WeightedProblem& p, const JointCosts& c, const Weight& m);

/// Exact comparison of weighted costs: negative, zero or positive as a is
/// cheaper, equal or dearer than b at weight m.
int compare_weighted(const WeightedProblem& p, const JointCosts& a, const JointCosts& b,
                     const Weight& m);

/// Pedestrian and vehicle light bits form exactly one joint mode (Exclusive)
/// or at most one (Relaxed) at every junction and interval; every lit stage
/// must belong to an active joint mode.
bool joint_feasible(const ThetaBits& ped, const ThetaBits& veh, const StageCoupling& coupling);
bool joint_feasible(const Schedule& ped, const Schedule& veh, const StageCoupling& coupling);

enum class JointSolver { Exact, Dhs };

struct JointSolution {
  Weight weight;
  Schedule ped_schedule;
  Schedule veh_schedule;
  JointCosts costs;
  bool certified = true;
  long nodes = 0;
};

struct WeightedSolveOptions {
  JointSolver solver = JointSolver::Exact;
  DhsParams dhs;
  std::uint64_t seed = 1;
};

JointSolution solve_weighted(const WeightedProblem& p, const Weight& m,
                             const WeightedSolveOptions& options = {});

/// Pure-vehicle optimum by direct enumeration of vehicle schedules
/// (independent of the joint search).  Guarded by max_bits.
struct VehicleOptimum {
  Schedule schedule;
  Count units = 0;
};
VehicleOptimum vehicle_optimum(const GridNetwork& net, const VehScenario& veh, int max_bits = 20);

/// Exact rational.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Smallest weight from which the weighted optimum stops changing, read off
/// the tabulated costs.  The limiting schedule minimizes pedestrian delay,
/// then vehicle delay.  Requires a tabulated problem.
struct SaturationPoint {
  Rational weight;
  std::uint64_t rank = 0;
  JointCosts costs;
};
SaturationPoint saturation_weight(const WeightedProblem& p);

struct SweepPoint {
  JointSolution solution;
  ScaledCost scaled;
  /// Fraction of entries differing from the previous point's vehicle schedule.
  double sf_turning = 0.0;
  bool turning = false;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // ascending weight
  std::vector<Weight> turning_weights;
  std::vector<double> sf_at_turning;
  bool certified = true;
};

struct SweepOptions {
  bool refine = false;
  Weight resolution{1, 4};
  WeightedSolveOptions solve;
};

/// Solves at each grid weight (ascending, starting at 0).  With refine,
/// bisects between neighbours whose schedules differ until each change is
/// bracketed within the resolution.
SweepResult sweep_weights(const WeightedProblem& p, const std::vector<Weight>& grid,
                          const SweepOptions& options = {});

/// Integer grid 0, 1, ..., hi.
std::vector<Weight> integer_grid(int hi);

/// Mean over consecutive interval pairs of the fraction of junctions whose
/// stage changes.  Requires at least two intervals.
double switching_frequency_profile(const Schedule& s);

/// Fraction of junction-interval entries that differ.
double switching_frequency_turning(const Schedule& before, const Schedule& after);

/// weight,U_D,P_D_ratio,V_D_ratio,schedule_hash,SF_turning
void write_sweep_csv(std::ostream& out, const SweepResult& r);

}  // namespace pedsched
