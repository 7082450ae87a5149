#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "pedsched/common.hpp"
#include "pedsched/topology.hpp"

namespace pedsched {

struct VehParams {
  Count max_volume = 100;                 // per link
  std::vector<double> levels{0.3, 0.15};  // l^0 >= ... >= l^r > 0
  /// v* d* delta: vehicles per interval at unit speed level.
  double saturation = 100.0;
  /// L / v_max in intervals.
  int travel_intervals = 1;

  int memory() const { return static_cast<int>(levels.size()) - 1; }
  void validate() const;
};

struct VehScenario {
  GridSpec grid;
  VehParams params;
  std::vector<Count> initial;                // per link id
  std::vector<std::vector<Count>> inflow;    // per link id; empty for interior links
  /// Vehicle stages applied before the horizon, oldest first, per junction.
  /// Missing entries count as red for both stages.
  std::vector<std::vector<Stage>> history;

  void validate(const GridNetwork& net) const;
};

/// Selected speed category; index -1 means red (level 0).
struct SpeedLevel {
  int index = -1;
  double level = 0.0;
};

/// `green` holds theta_w(k-r..k), oldest first; entries before the start of
/// the record count as red.
SpeedLevel speed_category(std::span<const std::uint8_t> green, std::span<const double> levels);

/// Same selection from the count of trailing consecutive green intervals
/// (including k itself).
SpeedLevel speed_category_from_run(int trailing_green, std::span<const double> levels);

/// min(floor(lambda C_i), downstream space, floor(level * saturation)), >= 0.
Count vehicle_flow(Count upstream, double turning_ratio, Count downstream_space, double level,
                   double saturation);

struct VehStep {
  std::vector<Count> volume;    // C(k) per link
  std::vector<Count> outflow;   // s(k) per link
  std::vector<int> level_index; // speed category of the link's outgoing stream
  std::vector<double> level;
  std::vector<Count> accepted;  // boundary arrivals admitted
  std::vector<Count> dropped;   // boundary arrivals refused for lack of space
  Count delay_units = 0;        // sum of C - travel * s
};

struct VehTrace {
  double delta = 15.0;
  std::vector<VehStep> steps;
  std::vector<Count> final_volume;
};

/// Mutable plant state: link volumes plus, per junction, the green stage of
/// the last interval and how many intervals it has been green.
struct VehState {
  std::vector<Count> volume;
  std::vector<int> last_stage;  // -1 when unknown / red
  std::vector<int> trailing;

  static VehState initial(const GridNetwork& net, const VehScenario& scenario);
};

/// One-interval stepping for the one-way grid.  Flows are resolved sinks
/// first so each downstream outflow is known before its inflow is limited.
class VehModel {
 public:
  VehModel(const GridNetwork& net, const VehScenario& scenario);

  const GridNetwork& network() const { return *net_; }
  const VehScenario& scenario() const { return *scenario_; }

  /// `stages` holds the green vehicle stage of every junction in interval k.
  VehStep advance(VehState& state, std::span<const Stage> stages, int k) const;

 private:
  const GridNetwork* net_;
  const VehScenario* scenario_;
  std::vector<int> exits_;
  std::vector<int> order_;
  Count exit_cap_;
};

/// C(k+1) = C(k) + inflow - outflow per link, inflow being the upstream
/// link's outflow plus admitted boundary arrivals.  Throws ModelError if a
/// link ends above its maximum volume or below zero.
std::vector<Count> step_links(const GridNetwork& net, const VehParams& params,
                              std::span<const Count> volume, std::span<const Count> outflow,
                              std::span<const Count> accepted);

/// `schedule` holds vehicle stages.  Rejects cyclic networks.
VehTrace simulate_veh(const GridNetwork& net, const VehScenario& scenario, const Schedule& schedule);

Count vehicle_delay_units(const VehTrace& trace);
/// Total vehicle delay in vehicle-seconds.
double vehicle_delay(const VehTrace& trace);

/// Long-format CSV: link,interval,volume,flow_out,level,step_delay,dropped
void write_trace_csv(std::ostream& out, const VehTrace& trace, const VehParams& params);

}  // namespace pedsched
