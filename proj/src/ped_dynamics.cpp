#include "pedsched/ped_dynamics.hpp"

#include <algorithm>
#include <ostream>
#include <string>

namespace pedsched {

namespace {

constexpr double kNarrowSecondsPerPed = 0.27;
constexpr double kWideSecondsPerPedMetre = 0.81;
constexpr double kNarrowWidthLimit = 3.0;

void check_ratio(double r, const char* what, int j, int k) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw ValidationError(std::string(what) + " ratio out of [0,1] at junction " +
                          std::to_string(j) + " interval " + std::to_string(k));
  }
}

}  // namespace

void CrosswalkGeometry::validate() const {
  if (!(length > 0.0) || !(width > 0.0) || !(walk_speed > 0.0) || !(startup > 0.0)) {
    throw ValidationError("crosswalk length, width, walk speed and start-up time must be positive");
  }
  if (waiting_zone_capacity && *waiting_zone_capacity < 0) {
    throw ValidationError("waiting zone capacity must be non-negative");
  }
}

double crossing_time(Count n_ped, const CrosswalkGeometry& g) {
  const double base = g.startup + g.walk_time();
  const double n = static_cast<double>(n_ped);
  if (g.width <= kNarrowWidthLimit) return base + kNarrowSecondsPerPed * n;
  return base + kWideSecondsPerPedMetre * n / g.width;
}

double clearance_rate(const CrosswalkGeometry& g) {
  return g.width <= kNarrowWidthLimit ? 1.0 / kNarrowSecondsPerPed
                                      : g.width / kWideSecondsPerPedMetre;
}

Count capacity(GreenPosition position, const CrosswalkGeometry& g, double delta) {
  const double lost = g.startup + g.walk_time();
  if (delta - lost <= 0.0) {
    throw GeometryError("sampling interval " + std::to_string(delta) +
                        " s does not exceed start-up plus walk time " + std::to_string(lost) + " s");
  }
  const double usable = position == GreenPosition::First ? delta - lost : delta;
  // Inverting the crossing-time regression: T = lost + usable.
  if (g.width <= kNarrowWidthLimit) return floor_count(usable / kNarrowSecondsPerPed);
  return floor_count(usable * g.width / kWideSecondsPerPedMetre);
}

Count capacity(int k, bool prev_green, const CrosswalkGeometry& g, double delta) {
  const bool first = k == 1 || !prev_green;
  return capacity(first ? GreenPosition::First : GreenPosition::Continuing, g, delta);
}

Count hopping_flow(Count volume, double ratio, Count cap, bool green) {
  if (!green) return 0;
  return std::max<Count>(0, std::min(cap, floor_count(static_cast<double>(volume) * ratio)));
}

void PedScenario::validate() const {
  geometry.validate();
  if (!(delta > 0.0)) throw ValidationError("sampling interval must be positive");
  if (steps < 1) throw ValidationError("prediction steps must be at least 1");
  // Surfaces GeometryError for intervals shorter than one crossing.
  (void)capacity(GreenPosition::First, geometry, delta);
  const auto n = static_cast<std::size_t>(steps);
  for (int j = 0; j < junction_count(); ++j) {
    const PedJunctionDemand& d = junctions[static_cast<std::size_t>(j)];
    if (d.arrivals.size() < n || d.alpha.size() < n || d.gamma.size() < n) {
      throw ValidationError("junction " + std::to_string(j) + " demand shorter than horizon of " +
                            std::to_string(steps) + " intervals");
    }
    for (Count p : d.initial) {
      if (p < 0) throw ValidationError("initial volume must be non-negative");
    }
    for (std::size_t k = 0; k < n; ++k) {
      for (int i = 0; i < kCornerCount; ++i) {
        if (d.arrivals[k][static_cast<std::size_t>(i)] < 0) {
          throw ValidationError("arrivals must be non-negative");
        }
        check_ratio(d.alpha[k][static_cast<std::size_t>(i)], "diversion", j, static_cast<int>(k));
        check_ratio(d.gamma[k][static_cast<std::size_t>(i)], "departure", j, static_cast<int>(k));
      }
    }
  }
}

PedScenario PedScenario::slice(int j) const {
  PedScenario s;
  s.geometry = geometry;
  s.delta = delta;
  s.steps = steps;
  s.junctions.push_back(junctions.at(static_cast<std::size_t>(j)));
  return s;
}

Count PedStep::delay_units() const {
  Count total = 0;
  for (int i = 0; i < kCornerCount; ++i) total += volume[i] - outflow[i];
  return total;
}

namespace {
const CrosswalkGeometry& validated(const CrosswalkGeometry& g) {
  g.validate();
  return g;
}
}  // namespace

PedModel::PedModel(const CrosswalkGeometry& g, double delta)
    : geometry_(validated(g)),
      delta_(delta),
      first_(capacity(GreenPosition::First, g, delta)),
      continuing_(capacity(GreenPosition::Continuing, g, delta)) {}

CornerCounts step_volumes(const CornerCounts& volume, const std::array<Count, kStreamCount>& flow,
                          const CornerCounts& arrivals, const CornerRatios& gamma,
                          CornerCounts* departures) {
  CornerCounts in{};
  CornerCounts out{};
  for (Stage o : {Stage::Horizontal, Stage::Vertical}) {
    for (const Stream& s : JunctionTopology::standard().enabled_by(o)) {
      const Count f = flow[static_cast<std::size_t>(stream_id(o, s.from))];
      out[s.from] += f;
      in[s.to] += f;
    }
  }
  CornerCounts next{};
  for (int i = 0; i < kCornerCount; ++i) {
    const Count dep = floor_count(gamma[i] * static_cast<double>(in[i]));
    if (departures) (*departures)[i] = dep;
    next[i] = volume[i] + arrivals[i] + in[i] - out[i] - dep;
    if (next[i] < 0) {
      throw ModelError("corner " + std::to_string(i + 1) + " volume would become negative");
    }
  }
  return next;
}

PedStep PedModel::advance(CornerCounts& volume, std::optional<Stage> prev, Stage stage,
                          const CornerCounts& arrivals, const CornerRatios& alpha,
                          const CornerRatios& gamma) const {
  PedStep step;
  step.stage = stage;
  step.volume = volume;
  for (Stage o : {Stage::Horizontal, Stage::Vertical}) {
    step.capacity[index(o)] = capacity_for(prev, o);
  }
  const Count cap = step.capacity[index(stage)];
  for (const Stream& s : JunctionTopology::standard().enabled_by(stage)) {
    const double eta = stage == Stage::Horizontal ? alpha[s.from] : 1.0 - alpha[s.from];
    Count f = hopping_flow(volume[s.from], eta, cap, true);
    if (geometry_.waiting_zone_capacity) {
      f = std::min(f, std::max<Count>(0, *geometry_.waiting_zone_capacity - volume[s.to]));
    }
    step.flow[static_cast<std::size_t>(stream_id(stage, s.from))] = f;
    step.outflow[s.from] += f;
    step.inflow[s.to] += f;
  }
  volume = step_volumes(volume, step.flow, arrivals, gamma, &step.departures);
  return step;
}

JunctionTrace simulate_junction(const PedScenario& scenario, int j, std::span<const Stage> stages) {
  const PedModel model(scenario.geometry, scenario.delta);
  const PedJunctionDemand& d = scenario.junctions.at(static_cast<std::size_t>(j));
  JunctionTrace trace;
  trace.steps.reserve(stages.size());
  CornerCounts volume = d.initial;
  std::optional<Stage> prev = d.prev_stage;
  for (std::size_t k = 0; k < stages.size(); ++k) {
    trace.steps.push_back(
        model.advance(volume, prev, stages[k], d.arrivals[k], d.alpha[k], d.gamma[k]));
    prev = stages[k];
  }
  trace.final_volume = volume;
  return trace;
}

PedTrace simulate(const PedScenario& scenario, const Schedule& schedule) {
  if (schedule.junctions() != scenario.junction_count() || schedule.steps() > scenario.steps) {
    throw ValidationError("schedule shape does not match the pedestrian scenario");
  }
  PedTrace trace;
  trace.delta = scenario.delta;
  trace.junctions.reserve(static_cast<std::size_t>(scenario.junction_count()));
  for (int j = 0; j < scenario.junction_count(); ++j) {
    trace.junctions.push_back(simulate_junction(scenario, j, schedule.junction(j)));
  }
  return trace;
}

Count delay_units(const JunctionTrace& trace) {
  Count total = 0;
  for (const PedStep& s : trace.steps) total += s.delay_units();
  return total;
}

Count delay_units(const PedTrace& trace) {
  Count total = 0;
  for (const JunctionTrace& jt : trace.junctions) total += delay_units(jt);
  return total;
}

double delay_cost(const PedTrace& trace) {
  return static_cast<double>(delay_units(trace)) * trace.delta;
}

void write_trace_csv(std::ostream& out, const PedTrace& trace, const Schedule& schedule) {
  out << "junction,interval,corner,volume,stage,capacity,flow_count,step_delay\n";
  for (std::size_t j = 0; j < trace.junctions.size(); ++j) {
    const JunctionTrace& jt = trace.junctions[j];
    for (std::size_t k = 0; k < jt.steps.size(); ++k) {
      const PedStep& s = jt.steps[k];
      const Stage stage = schedule.at(static_cast<int>(j), static_cast<int>(k));
      for (int i = 0; i < kCornerCount; ++i) {
        const Count step_delay = s.volume[i] - s.outflow[i];
        out << j << ',' << k + 1 << ',' << i + 1 << ',' << s.volume[i] << ',' << to_string(stage)
            << ',' << s.capacity[index(stage)] << ',' << s.outflow[i] << ','
            << format_number(static_cast<double>(step_delay) * trace.delta) << '\n';
      }
    }
  }
}

}  // namespace pedsched
