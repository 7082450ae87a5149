#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "pedsched/common.hpp"
#include "pedsched/topology.hpp"

namespace pedsched {

using CornerCounts = std::array<Count, kCornerCount>;
using CornerRatios = std::array<double, kCornerCount>;

/// Crosswalk geometry with typical urban defaults.
struct CrosswalkGeometry {
  double length = 8.5;      // m
  double width = 4.0;       // m
  double walk_speed = 1.2;  // m/s
  double startup = 3.2;     // s
  /// Optional finite waiting-zone size.  Unset means unbounded corners.
  std::optional<Count> waiting_zone_capacity;

  double walk_time() const { return length / walk_speed; }
  void validate() const;
};

/// Platoon crossing time in seconds for n_ped pedestrians (HCM regression).
double crossing_time(Count n_ped, const CrosswalkGeometry& g);

/// Pedestrians cleared per second of green: 1/0.27 for narrow crosswalks,
/// W/0.81 for crosswalks wider than 3 m.
double clearance_rate(const CrosswalkGeometry& g);

enum class GreenPosition { First, Continuing };

/// Crosswalk capacity for one interval.  The first green interval of a run
/// loses the start-up and walk time.  Throws GeometryError when the interval
/// is too short to cross at all.
Count capacity(GreenPosition position, const CrosswalkGeometry& g, double delta);

/// Capacity at 1-based interval k given the stage's light in k-1.
Count capacity(int k, bool prev_green, const CrosswalkGeometry& g, double delta);

/// Crossing count f_ij * delta: min(capacity, floor(P_i * eta)) on green, 0 on red.
Count hopping_flow(Count volume, double ratio, Count cap, bool green);

/// Demand and ratios for one junction over the horizon.  Arrivals are counts
/// per interval (I_i(k) * delta).  Only the horizontal diversion ratio is
/// stored; the vertical one is 1 - alpha, so alpha + beta = 1 holds by
/// construction.
struct PedJunctionDemand {
  CornerCounts initial{};
  std::vector<CornerCounts> arrivals;
  std::vector<CornerRatios> alpha;
  std::vector<CornerRatios> gamma;
  /// Pedestrian stage green in the interval before the horizon, if known.
  std::optional<Stage> prev_stage;

  double ratio(int k, Corner i, Stage o) const {
    const double a = alpha[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
    return o == Stage::Horizontal ? a : 1.0 - a;
  }
};

struct PedScenario {
  CrosswalkGeometry geometry;
  double delta = 15.0;
  int steps = 1;
  std::vector<PedJunctionDemand> junctions;

  int junction_count() const { return static_cast<int>(junctions.size()); }
  void validate() const;
  /// One-junction scenario for junction j.
  PedScenario slice(int j) const;
};

/// Bookkeeping for one junction and one interval.
struct PedStep {
  Stage stage = Stage::Horizontal;
  CornerCounts volume{};                  // P_i(k)
  std::array<Count, kStageCount> capacity{};  // P^_o(k) for both stages
  std::array<Count, kStreamCount> flow{};     // f_ij(k) * delta, by stream id
  CornerCounts outflow{};
  CornerCounts inflow{};
  CornerCounts departures{};

  /// Sum over corners of P_i(k) - outgoing crossings.
  Count delay_units() const;
};

struct JunctionTrace {
  std::vector<PedStep> steps;
  CornerCounts final_volume{};
};

struct PedTrace {
  double delta = 15.0;
  std::vector<JunctionTrace> junctions;
};

/// Precomputed per-scenario constants used by every simulation step.
class PedModel {
 public:
  explicit PedModel(const CrosswalkGeometry& g, double delta);

  Count first_capacity() const { return first_; }
  Count continuing_capacity() const { return continuing_; }
  double delta() const { return delta_; }
  const CrosswalkGeometry& geometry() const { return geometry_; }

  Count capacity_for(std::optional<Stage> prev, Stage o) const {
    return prev == o ? continuing_ : first_;
  }

  /// Advances one junction by one interval under `stage`.  `volume` holds
  /// P(k) on entry and P(k+1) on exit.
  PedStep advance(CornerCounts& volume, std::optional<Stage> prev, Stage stage,
                  const CornerCounts& arrivals, const CornerRatios& alpha,
                  const CornerRatios& gamma) const;

 private:
  CrosswalkGeometry geometry_;
  double delta_;
  Count first_;
  Count continuing_;
};

/// P(k+1) = P(k) + arrivals + inflow - outflow - floor(gamma * inflow).
/// Throws ModelError if any corner would go negative.
CornerCounts step_volumes(const CornerCounts& volume, const std::array<Count, kStreamCount>& flow,
                          const CornerCounts& arrivals, const CornerRatios& gamma,
                          CornerCounts* departures = nullptr);

JunctionTrace simulate_junction(const PedScenario& scenario, int j, std::span<const Stage> stages);

/// Rolls every junction forward.  Junctions are independent.
PedTrace simulate(const PedScenario& scenario, const Schedule& schedule);

/// Delay in pedestrian-intervals: sum of (P_i(k) - outgoing crossings).
Count delay_units(const JunctionTrace& trace);
Count delay_units(const PedTrace& trace);

/// Total pedestrian delay in pedestrian-seconds.
double delay_cost(const PedTrace& trace);

/// Long-format CSV: junction,interval,corner,volume,stage,capacity,flow_count,step_delay
void write_trace_csv(std::ostream& out, const PedTrace& trace, const Schedule& schedule);

}  // namespace pedsched
