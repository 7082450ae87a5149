#include "pedsched/mpc.hpp"

#include <algorithm>
#include <ostream>

#include "json.hpp"

namespace pedsched {

const char* to_string(MpcObjective o) {
  switch (o) {
    case MpcObjective::Delay: return "delay";
    case MpcObjective::Unhappiness: return "unhappiness";
    case MpcObjective::Weighted: return "weighted";
  }
  return "?";
}

MpcObjective parse_mpc_objective(const std::string& s) {
  if (s == "delay") return MpcObjective::Delay;
  if (s == "unhappiness") return MpcObjective::Unhappiness;
  if (s == "weighted") return MpcObjective::Weighted;
  throw ValidationError("unknown objective '" + s + "'");
}

void MpcOptions::validate() const {
  if (horizon < 1) throw ValidationError("MPC horizon must be at least one interval");
  if (intervals < 0) throw ValidationError("MPC interval count must be non-negative");
  if (!(noise >= 0.0 && noise < 1.0)) throw ValidationError("prediction noise must lie in [0, 1)");
  if (solver == JointSolver::Dhs) dhs.validate();
}

Count MpcRun::ped_units() const {
  Count t = 0;
  for (const MpcStep& s : steps) t += s.ped_units;
  return t;
}

Count MpcRun::veh_units() const {
  Count t = 0;
  for (const MpcStep& s : steps) t += s.veh_units;
  return t;
}

namespace {

template <typename T>
const T& held(const std::vector<T>& series, int k) {
  return series[std::min(static_cast<std::size_t>(k), series.size() - 1)];
}

PedJunctionDemand ped_window(const PedJunctionDemand& d, const CornerCounts& volume,
                             std::optional<Stage> prev, int k0, int n, double noise,
                             Random& rng) {
  PedJunctionDemand w;
  w.initial = volume;
  w.prev_stage = prev;
  for (int k = k0; k < k0 + n; ++k) {
    CornerCounts a = held(d.arrivals, k);
    if (noise > 0.0) {
      for (Count& c : a) {
        const double f = 1.0 + noise * (2.0 * rng.uniform01() - 1.0);
        c = std::max<Count>(0, floor_count(static_cast<double>(c) * f));
      }
    }
    w.arrivals.push_back(a);
    w.alpha.push_back(held(d.alpha, k));
    w.gamma.push_back(held(d.gamma, k));
  }
  return w;
}

VehScenario veh_window(const VehScenario& plant, const VehState& state, int k0, int n) {
  VehScenario w;
  w.grid = plant.grid;
  w.grid.steps = n;
  w.params = plant.params;
  w.initial = state.volume;
  w.inflow.resize(plant.inflow.size());
  for (std::size_t l = 0; l < plant.inflow.size(); ++l) {
    if (plant.inflow[l].empty()) continue;
    for (int k = k0; k < k0 + n; ++k) w.inflow[l].push_back(held(plant.inflow[l], k));
  }
  const auto depth = static_cast<int>(plant.params.levels.size());
  for (std::size_t j = 0; j < state.last_stage.size(); ++j) {
    std::vector<Stage> h;
    if (state.last_stage[j] >= 0) {
      h.assign(static_cast<std::size_t>(std::min(state.trailing[j], depth)),
               static_cast<Stage>(state.last_stage[j]));
    }
    w.history.push_back(std::move(h));
  }
  return w;
}

}  // namespace

Scenario plant_for(const Scenario& plant, int intervals) {
  Scenario s = plant;
  s.grid.steps = intervals;
  s.ped.steps = intervals;
  if (s.veh) s.veh->grid.steps = intervals;
  s.validate();
  return s;
}

MpcRun run_mpc(const Scenario& plant_in, const MpcOptions& options) {
  options.validate();
  plant_in.validate();
  const int L = plant_in.demand_intervals();
  const int T = options.intervals > 0 ? options.intervals : L;
  if (T > L) throw ValidationError("MPC run is longer than the plant's demand series");
  const Scenario plant = plant_for(plant_in, T);
  if (options.objective == MpcObjective::Weighted && !plant.veh) {
    throw ValidationError("weighted MPC needs a vehicle layer");
  }
  const int J = plant.grid.junctions();
  const int N = options.horizon;

  const PedModel ped_model(plant.ped.geometry, plant.ped.delta);
  std::vector<CornerCounts> ped_volume;
  std::vector<std::optional<Stage>> ped_prev;
  for (const PedJunctionDemand& d : plant.ped.junctions) {
    ped_volume.push_back(d.initial);
    ped_prev.push_back(d.prev_stage);
  }
  std::optional<GridNetwork> net;
  std::optional<VehModel> veh_model;
  VehState veh_state;
  if (plant.veh) {
    net.emplace(plant.grid);
    veh_model.emplace(*net, *plant.veh);
    veh_state = VehState::initial(*net, *plant.veh);
  }

  MpcRun run;
  run.horizon = N;
  run.has_vehicles = plant.veh.has_value();
  run.applied = Schedule(J, T);
  run.applied_veh = Schedule(J, T);
  Random noise_rng(options.noise_seed);

  for (int k = 0; k < T; ++k) {
    PedScenario window;
    window.geometry = plant.ped.geometry;
    window.delta = plant.ped.delta;
    window.steps = N;
    for (int j = 0; j < J; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      window.junctions.push_back(ped_window(plant.ped.junctions[ju], ped_volume[ju], ped_prev[ju],
                                            k, N, options.noise, noise_rng));
    }

    MpcStep rec;
    rec.interval = k;
    Schedule plan;
    if (options.objective == MpcObjective::Weighted) {
      const WeightedProblem wp(window, veh_window(*plant.veh, veh_state, k, N), plant.coupling,
                               options.integration);
      WeightedSolveOptions so;
      so.solver = options.solver;
      so.dhs = options.dhs;
      so.seed = options.seed + static_cast<std::uint64_t>(k);
      const JointSolution sol = solve_weighted(wp, options.weight, so);
      plan = sol.ped_schedule;
      rec.window_cost = scaled_cost(wp, sol.costs, options.weight).u_d;
      run.certified = run.certified && sol.certified;
    } else {
      const PedObjective obj = options.objective == MpcObjective::Delay ? PedObjective::Delay
                                                                       : PedObjective::Unhappiness;
      if (options.solver == JointSolver::Exact) {
        ExactOptions eo;
        eo.threads = options.threads;
        eo.unhappiness = options.unhappiness;
        const NetworkSolution sol = solve_exact_network(window, obj, eo);
        plan = sol.schedule;
        rec.window_cost = sol.cost;
      } else {
        const DhsPedSolution sol = solve_dhs(window, obj, options.dhs,
                                             options.seed + static_cast<std::uint64_t>(k),
                                             options.unhappiness);
        plan = sol.schedule;
        rec.window_cost = sol.cost;
        run.certified = false;
      }
    }

    const auto ku = static_cast<std::size_t>(k);
    std::vector<Stage> veh_column(static_cast<std::size_t>(J));
    for (int j = 0; j < J; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const Stage o = plan.at(j, 0);
      const PedJunctionDemand& d = plant.ped.junctions[ju];
      const PedStep step =
          ped_model.advance(ped_volume[ju], ped_prev[ju], o, d.arrivals[ku], d.alpha[ku], d.gamma[ku]);
      ped_prev[ju] = o;
      rec.ped_units += step.delay_units();
      rec.ped_stages.push_back(o);
      run.applied.set(j, k, o);
      veh_column[ju] = plant.coupling.vehicle_stage(o);
      run.applied_veh.set(j, k, veh_column[ju]);
    }
    if (veh_model) rec.veh_units = veh_model->advance(veh_state, veh_column, k).delay_units;
    run.steps.push_back(std::move(rec));
  }
  run.final_ped_volume = ped_volume;
  run.final_veh_volume = veh_state.volume;
  return run;
}

void write_applied_csv(std::ostream& out, const MpcRun& run, double delta) {
  out << "junction,interval,ped_stage,veh_stage,ped_delay,veh_delay\n";
  for (const MpcStep& s : run.steps) {
    for (std::size_t j = 0; j < s.ped_stages.size(); ++j) {
      const int ji = static_cast<int>(j);
      out << j << ',' << s.interval << ',' << to_string(s.ped_stages[j]) << ','
          << to_string(run.applied_veh.at(ji, s.interval)) << ',';
      // Per-interval delays are network totals; reported on the first row.
      if (j == 0) {
        out << format_number(static_cast<double>(s.ped_units) * delta) << ','
            << format_number(static_cast<double>(s.veh_units) * delta);
      } else {
        out << ',';
      }
      out << '\n';
    }
  }
}

void write_mpc_summary(std::ostream& out, const MpcRun& run, const MpcOptions& o, double delta) {
  nlohmann::ordered_json j;
  j["horizon"] = o.horizon;
  j["intervals"] = static_cast<int>(run.steps.size());
  j["objective"] = to_string(o.objective);
  if (o.objective == MpcObjective::Weighted) j["weight"] = o.weight.to_string();
  j["solver"] = o.solver == JointSolver::Exact ? "exact" : "dhs";
  j["seed"] = o.seed;
  j["noise"] = o.noise;
  j["noise_seed"] = o.noise_seed;
  if (o.solver == JointSolver::Dhs) {
    j["dhs"] = {{"hms", o.dhs.hms}, {"ni", o.dhs.ni}, {"hmcr", o.dhs.hmcr}, {"par", o.dhs.par},
                {"bw", o.dhs.bw}};
  }
  j["certified"] = run.certified;
  j["ped_delay"] = static_cast<double>(run.ped_units()) * delta;
  if (run.has_vehicles) j["veh_delay"] = static_cast<double>(run.veh_units()) * delta;
  auto steps = nlohmann::ordered_json::array();
  for (const MpcStep& s : run.steps) {
    std::string stages;
    for (Stage st : s.ped_stages) stages += st == Stage::Horizontal ? 'H' : 'V';
    steps.push_back({{"interval", s.interval},
                     {"stages", stages},
                     {"ped_delay", static_cast<double>(s.ped_units) * delta},
                     {"veh_delay", static_cast<double>(s.veh_units) * delta},
                     {"window_cost", s.window_cost}});
  }
  j["steps"] = steps;
  out << j.dump(1) << '\n';
}

}  // namespace pedsched
