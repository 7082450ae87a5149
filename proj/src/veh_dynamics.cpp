#include "pedsched/veh_dynamics.hpp"

#include <algorithm>
#include <ostream>
#include <string>

namespace pedsched {

void VehParams::validate() const {
  if (max_volume < 0) throw ValidationError("link maximum volume must be non-negative");
  if (levels.empty()) throw ValidationError("at least one speed level is required");
  for (std::size_t p = 0; p < levels.size(); ++p) {
    if (!(levels[p] > 0.0)) throw ValidationError("speed levels must be positive");
    if (p > 0 && levels[p] > levels[p - 1]) {
      throw ValidationError("speed levels must be non-increasing");
    }
  }
  if (!(saturation >= 0.0)) throw ValidationError("saturation count must be non-negative");
  if (travel_intervals < 0) throw ValidationError("travel ratio must be non-negative");
}

void VehScenario::validate(const GridNetwork& net) const {
  grid.validate();
  params.validate();
  const auto links = static_cast<std::size_t>(net.link_count());
  if (initial.size() != links) throw ValidationError("initial link volumes do not match network");
  if (inflow.size() != links) throw ValidationError("boundary inflow table does not match network");
  for (const Link& l : net.links()) {
    const Count c = initial[static_cast<std::size_t>(l.id)];
    if (c < 0 || c > params.max_volume) {
      throw ValidationError("initial volume of link " + std::to_string(l.id) + " outside [0, max]");
    }
    const auto& in = inflow[static_cast<std::size_t>(l.id)];
    if (!l.boundary() && !in.empty()) {
      throw ValidationError("interior link " + std::to_string(l.id) + " cannot take boundary inflow");
    }
    if (l.boundary() && in.size() < static_cast<std::size_t>(grid.steps)) {
      throw ValidationError("boundary inflow of link " + std::to_string(l.id) +
                            " shorter than the horizon");
    }
    for (Count x : in) {
      if (x < 0) throw ValidationError("boundary inflow must be non-negative");
    }
  }
  if (!history.empty() && history.size() != static_cast<std::size_t>(net.junction_count())) {
    throw ValidationError("light history must list every junction");
  }
}

SpeedLevel speed_category_from_run(int trailing_green, std::span<const double> levels) {
  if (trailing_green <= 0) return {};
  const int r = static_cast<int>(levels.size()) - 1;
  // r+1 trailing greens reach the top level; q+1 trailing greens give l^{r-q}.
  const int p = trailing_green >= r + 1 ? 0 : r - (trailing_green - 1);
  return {p, levels[static_cast<std::size_t>(p)]};
}

SpeedLevel speed_category(std::span<const std::uint8_t> green, std::span<const double> levels) {
  int trailing = 0;
  for (auto it = green.rbegin(); it != green.rend() && *it != 0; ++it) ++trailing;
  return speed_category_from_run(trailing, levels);
}

Count vehicle_flow(Count upstream, double turning_ratio, Count downstream_space, double level,
                   double saturation) {
  const Count demand = floor_count(turning_ratio * static_cast<double>(upstream));
  const Count speed_cap = floor_count(level * saturation);
  return std::max<Count>(0, std::min({demand, downstream_space, speed_cap}));
}

VehState VehState::initial(const GridNetwork& net, const VehScenario& scenario) {
  VehState s;
  s.volume = scenario.initial;
  s.last_stage.assign(static_cast<std::size_t>(net.junction_count()), -1);
  s.trailing.assign(static_cast<std::size_t>(net.junction_count()), 0);
  for (std::size_t j = 0; j < scenario.history.size(); ++j) {
    for (Stage st : scenario.history[j]) {
      const int w = index(st);
      s.trailing[j] = s.last_stage[j] == w ? s.trailing[j] + 1 : 1;
      s.last_stage[j] = w;
    }
  }
  return s;
}

VehModel::VehModel(const GridNetwork& net, const VehScenario& scenario)
    : net_(&net),
      scenario_(&scenario),
      exits_(net.exit_links()),
      order_(net.resolution_order()),
      exit_cap_(floor_count(scenario.params.levels.front() * scenario.params.saturation)) {
  (void)net.topological_order();  // throws on cycles
}

VehStep VehModel::advance(VehState& state, std::span<const Stage> stages, int k) const {
  const VehParams& prm = scenario_->params;
  const auto n_links = static_cast<std::size_t>(net_->link_count());
  const int r = prm.memory();

  VehStep step;
  step.volume = state.volume;
  step.outflow.assign(n_links, 0);
  step.level_index.assign(n_links, -1);
  step.level.assign(n_links, 0.0);
  step.accepted.assign(n_links, 0);
  step.dropped.assign(n_links, 0);

  // Exits discharge freely at the top speed level.
  for (int e : exits_) {
    const auto ei = static_cast<std::size_t>(e);
    step.outflow[ei] = std::min(state.volume[ei], exit_cap_);
    step.level_index[ei] = 0;
    step.level[ei] = prm.levels.front();
  }

  for (int j : order_) {
    const auto ji = static_cast<std::size_t>(j);
    const Stage green = stages[ji];
    const int w = index(green);
    const int trailing = std::min(state.last_stage[ji] == w ? state.trailing[ji] + 1 : 1, r + 1);
    const SpeedLevel lvl = speed_category_from_run(trailing, prm.levels);

    const auto in = static_cast<std::size_t>(net_->incoming_link(j, green));
    const auto out = static_cast<std::size_t>(net_->outgoing_link(j, green));
    const Count space = prm.max_volume - state.volume[out] + step.outflow[out];
    // One-way grid: every link has a single successor, so the turning ratio is 1.
    step.outflow[in] = vehicle_flow(state.volume[in], 1.0, space, lvl.level, prm.saturation);
    step.level_index[in] = lvl.index;
    step.level[in] = lvl.level;

    state.trailing[ji] = trailing;
    state.last_stage[ji] = w;
  }

  for (const Link& l : net_->links()) {
    if (!l.boundary()) continue;
    const auto li = static_cast<std::size_t>(l.id);
    const Count arriving = scenario_->inflow[li][static_cast<std::size_t>(k)];
    const Count space = prm.max_volume - state.volume[li] + step.outflow[li];
    step.accepted[li] = std::clamp<Count>(space, 0, arriving);
    step.dropped[li] = arriving - step.accepted[li];
  }

  for (std::size_t i = 0; i < n_links; ++i) {
    step.delay_units += state.volume[i] - prm.travel_intervals * step.outflow[i];
  }
  state.volume = step_links(*net_, prm, state.volume, step.outflow, step.accepted);
  return step;
}

std::vector<Count> step_links(const GridNetwork& net, const VehParams& params,
                              std::span<const Count> volume, std::span<const Count> outflow,
                              std::span<const Count> accepted) {
  std::vector<Count> next(volume.begin(), volume.end());
  for (const Link& l : net.links()) {
    const auto li = static_cast<std::size_t>(l.id);
    next[li] += accepted[li] - outflow[li];
    if (l.successor >= 0) next[static_cast<std::size_t>(l.successor)] += outflow[li];
  }
  for (const Link& l : net.links()) {
    const Count c = next[static_cast<std::size_t>(l.id)];
    if (c < 0 || c > params.max_volume) {
      throw ModelError("link " + std::to_string(l.id) + " volume " + std::to_string(c) +
                       " outside [0, " + std::to_string(params.max_volume) + "]");
    }
  }
  return next;
}

VehTrace simulate_veh(const GridNetwork& net, const VehScenario& scenario, const Schedule& schedule) {
  scenario.validate(net);
  if (schedule.junctions() != net.junction_count() || schedule.steps() > scenario.grid.steps) {
    throw ValidationError("schedule shape does not match the vehicle scenario");
  }
  const VehModel model(net, scenario);
  VehState state = VehState::initial(net, scenario);
  VehTrace trace;
  trace.delta = scenario.grid.delta;
  std::vector<Stage> column(static_cast<std::size_t>(net.junction_count()));
  for (int k = 0; k < schedule.steps(); ++k) {
    for (int j = 0; j < net.junction_count(); ++j) column[static_cast<std::size_t>(j)] = schedule.at(j, k);
    trace.steps.push_back(model.advance(state, column, k));
  }
  trace.final_volume = state.volume;
  return trace;
}

Count vehicle_delay_units(const VehTrace& trace) {
  Count total = 0;
  for (const VehStep& s : trace.steps) total += s.delay_units;
  return total;
}

double vehicle_delay(const VehTrace& trace) {
  return static_cast<double>(vehicle_delay_units(trace)) * trace.delta;
}

void write_trace_csv(std::ostream& out, const VehTrace& trace, const VehParams& params) {
  out << "link,interval,volume,flow_out,level,step_delay,dropped\n";
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const VehStep& s = trace.steps[k];
    for (std::size_t l = 0; l < s.volume.size(); ++l) {
      const Count units = s.volume[l] - params.travel_intervals * s.outflow[l];
      out << l << ',' << k + 1 << ',' << s.volume[l] << ',' << s.outflow[l] << ','
          << format_number(s.level[l]) << ',' << format_number(static_cast<double>(units) * trace.delta)
          << ',' << s.dropped[l] << '\n';
    }
  }
}

}  // namespace pedsched
