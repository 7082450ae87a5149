#pragma once

#include <string>
#include <vector>

#include "pedsched/milp_model.hpp"
#include "pedsched/ped_dynamics.hpp"

namespace pedsched {

struct MilpOptions {
  double epsilon = 1e-4;
};

/// Variable ids of the pedestrian-delay program, by junction, 0-based
/// interval, stage, stream and corner.
struct PedMilpIndex {
  int junctions = 0;
  int steps = 0;
  std::vector<int> theta;   // (j, k, o)
  std::vector<int> delta;   // (j, k, o)
  std::vector<int> cap;     // (j, k, o)
  std::vector<int> flow;    // (j, k, stream id)
  std::vector<int> volume;  // (j, k, corner): P(k+1), the volume after interval k

  std::size_t jko(int j, int k, Stage o) const {
    return (static_cast<std::size_t>(j) * steps + k) * kStageCount + index(o);
  }
  std::size_t jks(int j, int k, int stream) const {
    return (static_cast<std::size_t>(j) * steps + k) * kStreamCount + stream;
  }
  std::size_t jki(int j, int k, Corner i) const {
    return (static_cast<std::size_t>(j) * steps + k) * kCornerCount + i;
  }
};

struct PedMilp {
  MilpModel model;
  PedMilpIndex index;
};

/// Pedestrian delay program over every junction and interval.  Volumes and
/// crossings are integer counts per interval.  Throws GeometryError when the
/// interval is too short to cross, ValidationError for a finite waiting zone.
PedMilp build_milp(const PedScenario& scenario, const MilpOptions& options = {});

/// Pins the stage binaries to `schedule` through their bounds.
void fix_schedule(PedMilp& milp, const Schedule& schedule);

/// Variable assignment read off a simulated trace.  `theta` may differ from
/// the schedule the trace came from (to inject faults).
std::vector<double> trace_assignment(const PedMilp& milp, const ThetaBits& theta,
                                     const PedTrace& trace);

struct RowViolation {
  int row = -1;
  std::string name;
  std::string family;
  double amount = 0.0;
};

struct TraceCheckReport {
  int rows_checked = 0;
  std::vector<RowViolation> violations;

  bool ok() const { return violations.empty(); }
  /// Distinct families among the violations, sorted.
  std::vector<std::string> families() const;
};

/// Evaluates every row of the program on the trace's assignment.
TraceCheckReport check_trace(const PedMilp& milp, const ThetaBits& theta, const PedTrace& trace,
                             double tolerance = 1e-6);

/// Evaluates every row on an arbitrary assignment.
TraceCheckReport check_assignment(const MilpModel& model, const std::vector<double>& x,
                                  double tolerance = 1e-6);

}  // namespace pedsched
