#include "pedsched/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pedsched/dhs_solver.hpp"
#include "pedsched/exact_solver.hpp"
#include "pedsched/experiments.hpp"
#include "pedsched/integration.hpp"
#include "pedsched/lp_format.hpp"
#include "pedsched/milp_build.hpp"
#include "pedsched/mpc.hpp"
#include "pedsched/scenario_io.hpp"

namespace pedsched::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

/// Flags every subcommand accepts.
struct Common {
  std::string scenario;
  std::string grid;
  int steps = 0;
  int horizon = 0;
  std::string objective = "delay";
  std::string weight = "0";
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string format = "csv";
  int threads = 0;
};

struct Extra {
  // gen-scenario
  int demand_intervals = 0;
  std::vector<Count> initial, arrivals, veh_initial, veh_inflow;
  std::vector<double> alpha, gamma;
  bool no_vehicles = false;
  // simulate / check-milp
  std::string schedule;
  std::string lp;
  // solve-dhs / mpc / sweeps
  DhsParams dhs;
  std::string solver = "exact";
  // mpc-run
  int intervals = 8;
  double noise = 0.0;
  std::uint64_t noise_seed = 1;
  // sweep-weights
  int max_weight = 64;
  bool refine = false;
  std::string resolution = "0.25";
  // report
  std::string table = "all";
  std::vector<int> sizes{3};
  std::vector<int> horizons{30};
  int seeds = 10;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--scenario", c.scenario, "Scenario JSON file");
  sub->add_option("--grid", c.grid, "Generate a ROWSxCOLS grid scenario instead of loading one");
  sub->add_option("--steps", c.steps, "Prediction horizon in intervals")->check(CLI::PositiveNumber);
  sub->add_option("--horizon", c.horizon, "Prediction horizon in seconds (multiple of the interval)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--objective", c.objective, "delay | unhappiness | weighted")
      ->check(CLI::IsMember({"delay", "unhappiness", "weighted"}));
  sub->add_option("--weight", c.weight, "Pedestrian weight m for the weighted objective");
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--out", c.out, "Output directory");
  sub->add_option("--format", c.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", c.threads, "Worker thread cap (0 = hardware)")
      ->check(CLI::NonNegativeNumber);
}

void add_dhs(CLI::App* sub, Extra& e) {
  sub->add_option("--hms", e.dhs.hms, "Harmony memory size");
  sub->add_option("--ni", e.dhs.ni, "Improvisations");
  sub->add_option("--hmcr", e.dhs.hmcr, "Memory consideration rate");
  sub->add_option("--par", e.dhs.par, "Pitch adjustment rate");
  sub->add_option("--bw", e.dhs.bw, "Flip probability of an adjusted bit");
}

void add_solver(CLI::App* sub, Extra& e) {
  sub->add_option("--solver", e.solver, "exact | dhs")->check(CLI::IsMember({"exact", "dhs"}));
}

std::pair<int, int> parse_grid(const std::string& g) {
  const auto x = g.find_first_of("xX");
  try {
    if (x == std::string::npos) throw std::invalid_argument(g);
    std::size_t used_r = 0, used_c = 0;
    const int r = std::stoi(g.substr(0, x), &used_r);
    const int c = std::stoi(g.substr(x + 1), &used_c);
    if (used_r != x || used_c != g.size() - x - 1 || r < 1 || c < 1) throw std::invalid_argument(g);
    return {r, c};
  } catch (const std::exception&) {
    throw ValidationError("--grid expects ROWSxCOLS, got \"" + g + "\"");
  }
}

template <typename T>
Range<T> pair_range(const std::vector<T>& v, Range<T> fallback, const char* flag) {
  if (v.empty()) return fallback;
  if (v.size() != 2) throw ValidationError(std::string(flag) + " expects LO,HI");
  return {v[0], v[1]};
}

/// Horizon in intervals from --steps / --horizon, or 0 when neither is set.
int horizon_steps(const Common& c, double delta) {
  int n = c.steps;
  if (c.horizon > 0) {
    const double q = c.horizon / delta;
    if (std::abs(q - std::round(q)) > 1e-9) {
      throw ValidationError("--horizon " + std::to_string(c.horizon) +
                            " s is not a multiple of the " + format_number(delta) + " s interval");
    }
    const int from_seconds = static_cast<int>(std::lround(q));
    if (n > 0 && n != from_seconds) throw ValidationError("--steps and --horizon disagree");
    n = from_seconds;
  }
  return n;
}

GeneratorSpec generator_from_flags(const Common& c, const Extra& e, int default_steps) {
  GeneratorSpec g;
  const auto [rows, cols] = parse_grid(c.grid);
  g.rows = rows;
  g.cols = cols;
  g.seed = c.seed;
  const int n = horizon_steps(c, g.delta);
  g.steps = n > 0 ? n : default_steps;
  g.demand_intervals = e.demand_intervals;
  g.ped_initial = pair_range(e.initial, g.ped_initial, "--initial");
  g.ped_arrivals = pair_range(e.arrivals, g.ped_arrivals, "--arrivals");
  g.alpha = pair_range(e.alpha, g.alpha, "--alpha");
  g.gamma = pair_range(e.gamma, g.gamma, "--gamma");
  g.veh_initial = pair_range(e.veh_initial, g.veh_initial, "--veh-initial");
  g.veh_inflow = pair_range(e.veh_inflow, g.veh_inflow, "--veh-inflow");
  g.vehicles = !e.no_vehicles;
  return g;
}

/// Loaded or generated scenario with the requested horizon applied.
Scenario resolve_scenario(const Common& c, const Extra& e, int demand_intervals = 0) {
  if (!c.scenario.empty() && !c.grid.empty()) {
    throw ValidationError("give either --scenario or --grid, not both");
  }
  if (c.scenario.empty()) {
    if (c.grid.empty()) throw ValidationError("a scenario is required: --scenario FILE or --grid RxC");
    Extra ex = e;
    if (demand_intervals > 0) ex.demand_intervals = demand_intervals;
    GeneratorSpec g = generator_from_flags(c, ex, 2);
    if (g.demand_intervals > 0 && g.demand_intervals < g.steps) g.demand_intervals = g.steps;
    return generate_scenario(g);
  }
  Scenario s = load_scenario(c.scenario);
  const int n = horizon_steps(c, s.grid.delta);
  return n > 0 ? s.with_steps(n) : s;
}

class Outputs {
 public:
  explicit Outputs(const std::string& dir) : dir_(dir) { fs::create_directories(dir_); }

  /// `volatile_file` marks outputs that legitimately differ between runs.
  std::ofstream open(const std::string& name, bool volatile_file = false) {
    (volatile_file ? volatile_ : files_).push_back(name);
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
    return f;
  }
  fs::path path(const std::string& name) {
    files_.push_back(name);
    return dir_ / name;
  }
  const std::vector<std::string>& files() const { return files_; }
  const std::vector<std::string>& volatile_files() const { return volatile_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
  std::vector<std::string> volatile_;
};

/// Ordered key/value summary written as CSV or JSON.
class Summary {
 public:
  void add(const std::string& key, const Json& value) { j_[key] = value; }

  void write(Outputs& o, const std::string& format) const {
    if (format == "json") {
      o.open("summary.json") << j_.dump(1) << '\n';
      return;
    }
    auto f = o.open("summary.csv");
    f << "key,value\n";
    for (const auto& [k, v] : j_.items()) {
      f << k << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    }
  }
  void print(std::ostream& out) const {
    for (const auto& [k, v] : j_.items()) {
      out << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    }
  }

 private:
  Json j_;
};

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_schedule_csv(std::ostream& f, const Schedule& ped, const Schedule* veh) {
  f << "junction,interval,ped_stage" << (veh ? ",veh_stage" : "") << '\n';
  for (int j = 0; j < ped.junctions(); ++j) {
    for (int k = 0; k < ped.steps(); ++k) {
      f << j << ',' << k << ',' << to_string(ped.at(j, k));
      if (veh) f << ',' << to_string(veh->at(j, k));
      f << '\n';
    }
  }
}

/// Reads junction,interval,stage rows (extra columns ignored).
Schedule read_schedule_csv(const std::string& path, int junctions, int steps) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read schedule " + path);
  Schedule s(junctions, steps);
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(junctions) * steps, 0);
  std::string line;
  std::getline(in, line);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string js, ks, st;
    std::getline(row, js, ',');
    std::getline(row, ks, ',');
    std::getline(row, st, ',');
    int j = -1, k = -1;
    try {
      j = std::stoi(js);
      k = std::stoi(ks);
    } catch (const std::exception&) {
      throw ValidationError("schedule line " + std::to_string(lineno) + " is malformed");
    }
    if (j < 0 || j >= junctions || k < 0 || k >= steps || (st != "H" && st != "V")) {
      throw ValidationError("schedule line " + std::to_string(lineno) + " is out of range");
    }
    s.set(j, k, st == "H" ? Stage::Horizontal : Stage::Vertical);
    seen[static_cast<std::size_t>(j) * steps + k] = 1;
  }
  for (auto x : seen) {
    if (!x) throw ValidationError("schedule does not cover every junction and interval");
  }
  return s;
}

Schedule schedule_or_default(const Extra& e, const Scenario& s) {
  if (e.schedule.empty()) return Schedule(s.grid.junctions(), s.grid.steps);
  return read_schedule_csv(e.schedule, s.grid.junctions(), s.grid.steps);
}

void describe(Summary& sum, const Scenario& s) {
  sum.add("grid", std::to_string(s.grid.n_v) + "x" + std::to_string(s.grid.n_h));
  sum.add("steps", s.grid.steps);
  sum.add("delta", s.grid.delta);
  if (s.generator) sum.add("scenario_seed", s.generator->seed);
  sum.add("coupling", to_string(s.coupling.mode));
}

WeightedProblem weighted_problem(const Scenario& s, const Common& c) {
  if (!s.veh) throw ValidationError("the weighted objective needs a vehicle layer");
  IntegrationOptions io;
  io.threads = c.threads;
  return WeightedProblem(s.ped, *s.veh, s.coupling, io);
}

void joint_summary(Summary& sum, const WeightedProblem& p, const JointSolution& sol) {
  const ScaledCost sc = scaled_cost(p, sol.costs, sol.weight);
  sum.add("weight", sol.weight.to_string());
  sum.add("U_D", sc.u_d);
  sum.add("ped_delay", static_cast<double>(sol.costs.ped_units) * p.ped().delta);
  sum.add("veh_delay", static_cast<double>(sol.costs.veh_units) * p.ped().delta);
  sum.add("P_D_ratio", sc.ped_ratio);
  sum.add("V_D_ratio", sc.veh_ratio);
  sum.add("certified", sol.certified);
  sum.add("schedule_hash", hex(sol.veh_schedule.hash()));
}

// ------------------------------------------------------------ commands

void cmd_gen(const Common& c, const Extra& e, Outputs& o, std::ostream& out) {
  if (c.grid.empty()) throw ValidationError("gen-scenario needs --grid RxC");
  const Scenario s = generate_scenario(generator_from_flags(c, e, 2));
  save_scenario(o.path("scenario.json"), s);
  out << "wrote " << (o.dir() / "scenario.json").string() << '\n';
}

void cmd_simulate(const Common& c, const Extra& e, Outputs& o, std::ostream& out) {
  const Scenario s = resolve_scenario(c, e);
  const Schedule sch = schedule_or_default(e, s);
  const PedTrace pt = simulate(s.ped, sch);
  Summary sum;
  describe(sum, s);
  sum.add("schedule_hash", hex(sch.hash()));
  sum.add("ped_delay", delay_cost(pt));
  {
    auto f = o.open("ped_trace.csv");
    if (c.objective == "unhappiness") {
      write_trace_csv(f, s.ped, pt, sch, UnhappinessOptions{});
      sum.add("unhappiness", unhappiness_cost(s.ped, pt, sch));
    } else {
      write_trace_csv(f, pt, sch);
    }
  }
  if (s.veh) {
    const GridNetwork net(s.grid);
    Schedule veh(s.grid.junctions(), s.grid.steps);
    for (int j = 0; j < veh.junctions(); ++j) {
      for (int k = 0; k < veh.steps(); ++k) veh.set(j, k, s.coupling.vehicle_stage(sch.at(j, k)));
    }
    const VehTrace vt = simulate_veh(net, *s.veh, veh);
    auto f = o.open("veh_trace.csv");
    write_trace_csv(f, vt, s.veh->params);
    sum.add("veh_delay", vehicle_delay(vt));
  }
  sum.write(o, c.format);
  sum.print(out);
}

void cmd_solve(const Common& c, const Extra& e, Outputs& o, std::ostream& out, bool dhs) {
  const Scenario s = resolve_scenario(c, e);
  Summary sum;
  describe(sum, s);
  sum.add("objective", c.objective);
  sum.add("solver", dhs ? "dhs" : "exact");
  if (dhs) {
    sum.add("seed", c.seed);
    sum.add("hms", e.dhs.hms);
    sum.add("ni", e.dhs.ni);
    sum.add("hmcr", e.dhs.hmcr);
    sum.add("par", e.dhs.par);
    sum.add("bw", e.dhs.bw);
  }
  if (c.objective == "weighted") {
    const WeightedProblem p = weighted_problem(s, c);
    WeightedSolveOptions so;
    so.solver = dhs ? JointSolver::Dhs : JointSolver::Exact;
    so.dhs = e.dhs;
    so.seed = c.seed;
    const JointSolution sol = solve_weighted(p, Weight::parse(c.weight), so);
    joint_summary(sum, p, sol);
    auto f = o.open("schedule.csv");
    write_schedule_csv(f, sol.ped_schedule, &sol.veh_schedule);
  } else {
    const PedObjective obj = parse_ped_objective(c.objective);
    Schedule sch;
    double cost = 0.0;
    if (dhs) {
      const DhsPedSolution sol = solve_dhs(s.ped, obj, e.dhs, c.seed);
      sch = sol.schedule;
      cost = sol.cost;
      auto f = o.open("dhs_trace.csv");
      f << "iteration,best_cost\n";
      for (std::size_t i = 0; i < sol.trace.size(); ++i) {
        f << i + 1 << ',' << format_number(sol.trace[i]) << '\n';
      }
    } else {
      ExactOptions eo;
      eo.threads = c.threads;
      const NetworkSolution sol = solve_exact_network(s.ped, obj, eo);
      sch = sol.schedule;
      cost = sol.cost;
      sum.add("nodes", sol.nodes);
    }
    sum.add("cost", cost);
    sum.add("schedule_hash", hex(sch.hash()));
    sum.add("switching_frequency",
            sch.steps() >= 2 ? Json(switching_frequency_profile(sch)) : Json(nullptr));
    auto f = o.open("schedule.csv");
    write_schedule_csv(f, sch, nullptr);
  }
  sum.write(o, c.format);
  sum.print(out);
}

void cmd_export(const Common& c, const Extra& e, Outputs& o, std::ostream& out) {
  const Scenario s = resolve_scenario(c, e);
  const PedMilp m = build_milp(s.ped);
  export_lp(m.model, o.path("model.lp"));
  out << "variables: " << m.model.variable_count() << "\nconstraints: "
      << m.model.constraint_count() << "\nbinaries: " << m.model.count(VarKind::Binary) << '\n';
}

void cmd_check(const Common& c, const Extra& e, Outputs& o, std::ostream& out) {
  const Scenario s = resolve_scenario(c, e);
  const PedMilp m = build_milp(s.ped);
  if (!e.lp.empty() && !(import_lp(e.lp) == m.model)) {
    throw ValidationError("LP file " + e.lp + " does not match the scenario's program");
  }
  const Schedule sch = schedule_or_default(e, s);
  const TraceCheckReport r = check_trace(m, sch.theta(), simulate(s.ped, sch));
  {
    auto f = o.open("violations.csv");
    f << "row,name,family,amount\n";
    for (const RowViolation& v : r.violations) {
      f << v.row << ',' << v.name << ',' << v.family << ',' << format_number(v.amount) << '\n';
    }
  }
  Summary sum;
  describe(sum, s);
  sum.add("schedule_hash", hex(sch.hash()));
  sum.add("rows_checked", r.rows_checked);
  sum.add("violations", static_cast<int>(r.violations.size()));
  sum.write(o, c.format);
  sum.print(out);
}

void cmd_mpc(const Common& c, const Extra& e, Outputs& o, std::ostream& out) {
  const Scenario s = resolve_scenario(c, e, e.intervals);
  MpcOptions mo;
  mo.horizon = s.grid.steps;
  mo.intervals = std::min(e.intervals, s.demand_intervals());
  mo.objective = parse_mpc_objective(c.objective);
  mo.weight = Weight::parse(c.weight);
  mo.solver = e.solver == "dhs" ? JointSolver::Dhs : JointSolver::Exact;
  mo.dhs = e.dhs;
  mo.seed = c.seed;
  mo.noise = e.noise;
  mo.noise_seed = e.noise_seed;
  mo.threads = c.threads;
  const MpcRun run = run_mpc(s, mo);
  {
    auto f = o.open("applied_schedule.csv");
    write_applied_csv(f, run, s.grid.delta);
  }
  {
    auto f = o.open("mpc_run.json");
    write_mpc_summary(f, run, mo, s.grid.delta);
  }
  out << "intervals: " << run.steps.size() << "\nped_delay: "
      << format_number(static_cast<double>(run.ped_units()) * s.grid.delta) << '\n';
  if (run.has_vehicles) {
    out << "veh_delay: " << format_number(static_cast<double>(run.veh_units()) * s.grid.delta)
        << '\n';
  }
}

void cmd_sweep(const Common& c, const Extra& e, Outputs& o, std::ostream& out) {
  const Scenario s = resolve_scenario(c, e);
  const WeightedProblem p = weighted_problem(s, c);
  SweepOptions so;
  so.refine = e.refine;
  so.resolution = Weight::parse(e.resolution);
  so.solve.solver = e.solver == "dhs" ? JointSolver::Dhs : JointSolver::Exact;
  so.solve.dhs = e.dhs;
  so.solve.seed = c.seed;
  if (e.max_weight < 0) throw ValidationError("--max-weight must be non-negative");
  const SweepResult r = sweep_weights(p, integer_grid(e.max_weight), so);
  {
    auto f = o.open("sweep.csv");
    write_sweep_csv(f, r);
  }
  {
    auto f = o.open("turning.csv");
    f << "weight,SF_turning\n";
    for (std::size_t i = 0; i < r.turning_weights.size(); ++i) {
      f << r.turning_weights[i].to_string() << ',' << format_number(r.sf_at_turning[i]) << '\n';
    }
  }
  Summary sum;
  describe(sum, s);
  sum.add("solver", e.solver);
  sum.add("ped_max_delay", static_cast<double>(p.ped_max_units()) * s.grid.delta);
  sum.add("veh_max_delay", static_cast<double>(p.veh_max_units()) * s.grid.delta);
  sum.add("points", static_cast<int>(r.points.size()));
  sum.add("turning_points", static_cast<int>(r.turning_weights.size()));
  sum.add("certified", r.certified);
  if (p.tabulated()) {
    const SaturationPoint sat = saturation_weight(p);
    sum.add("saturation_weight", sat.weight.den == 1
                                     ? std::to_string(sat.weight.num)
                                     : std::to_string(sat.weight.num) + "/" +
                                           std::to_string(sat.weight.den));
  }
  sum.write(o, c.format);
  sum.print(out);
}

std::vector<std::uint64_t> seed_list(int n) {
  if (n < 1) throw ValidationError("--seeds must be at least 1");
  std::vector<std::uint64_t> v;
  for (int i = 1; i <= n; ++i) v.push_back(static_cast<std::uint64_t>(i));
  return v;
}

void cmd_report(const Common& c, const Extra& e, Outputs& o, std::ostream& out) {
  const std::vector<Cell> cs = cells(e.sizes, e.horizons);
  const std::vector<std::uint64_t> seeds = seed_list(e.seeds);
  Json timings;
  const bool all = e.table == "all";
  if (all || e.table == "scaling") {
    const auto rows = scaling_table(cs, c.seed, c.threads);
    auto f = o.open("scaling.csv");
    write_scaling_csv(f, rows);
    for (const ScalingRow& r : rows) {
      timings["scaling"].push_back({{"size", r.cell.size},
                                    {"horizon_s", r.cell.horizon_seconds},
                                    {"seconds", r.seconds}});
    }
  }
  if (all || e.table == "gap") {
    const auto rows = gap_table(cs, seeds, e.dhs, c.threads);
    {
      auto f = o.open("gap.csv");
      write_gap_csv(f, rows);
    }
    auto f = o.open("gap_summary.csv");
    f << "size,horizon_s,median_gap,max_gap\n";
    for (const GapSummary& g : summarize_gaps(rows)) {
      f << g.cell.size << ',' << g.cell.horizon_seconds << ',' << format_number(g.median) << ','
        << format_number(g.max) << '\n';
      out << g.cell.size << "x" << g.cell.size << " / " << g.cell.horizon_seconds
          << " s: median gap " << format_number(g.median) << ", max " << format_number(g.max)
          << '\n';
    }
    for (const GapRow& r : rows) {
      timings["dhs"].push_back({{"size", r.cell.size},
                                {"horizon_s", r.cell.horizon_seconds},
                                {"seed", r.seed},
                                {"seconds", r.dhs_seconds}});
    }
  }
  if (all || e.table == "sf") {
    const auto rows = sf_comparison(cs, seeds, c.threads);
    auto f = o.open("sf.csv");
    write_sf_csv(f, rows);
  }
  o.open("timings.json", true) << (timings.is_null() ? Json::object() : timings).dump(1) << '\n';
}

void write_manifest(Outputs& o, const std::string& command, const std::vector<std::string>& args,
                    const Common& c) {
  Json m;
  m["tool"] = "pedsched";
  m["version"] = kVersion;
  m["command"] = command;
  m["argv"] = args;
  m["seed"] = c.seed;
  auto files = o.files();
  std::sort(files.begin(), files.end());
  m["outputs"] = files;
  m["volatile_outputs"] = o.volatile_files();
  std::ofstream f(o.dir() / "manifest.json", std::ios::binary);
  f << m.dump(1) << '\n';
}

std::vector<std::string> replay_args(const std::string& manifest, const std::string& out_dir) {
  std::ifstream in(manifest);
  if (!in) throw ValidationError("cannot read manifest " + manifest);
  Json m;
  try {
    m = Json::parse(in);
  } catch (const Json::parse_error&) {
    throw ValidationError("manifest " + manifest + " is not valid JSON");
  }
  if (!m.contains("argv") || !m["argv"].is_array()) {
    throw ValidationError("manifest " + manifest + " has no argv");
  }
  auto args = m["argv"].get<std::vector<std::string>>();
  if (args.empty() || args.front() == "replay") throw ValidationError("manifest argv is not replayable");
  if (!out_dir.empty()) {
    bool replaced = false;
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--out") {
        args[i + 1] = out_dir;
        replaced = true;
      }
    }
    for (std::string& a : args) {
      if (a.rfind("--out=", 0) == 0) {
        a = "--out=" + out_dir;
        replaced = true;
      }
    }
    if (!replaced) {
      args.push_back("--out");
      args.push_back(out_dir);
    }
  }
  return args;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pedestrian and vehicle traffic light scheduling", "pedsched"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::map<std::string, Common> common;
  Extra extra;
  std::string manifest_path, replay_out;

  auto sub = [&](const char* name, const char* help) {
    CLI::App* s = app.add_subcommand(name, help);
    add_common(s, common[name]);
    return s;
  };

  CLI::App* gen = sub("gen-scenario", "Generate a seeded scenario file");
  gen->add_option("--demand-intervals", extra.demand_intervals, "Length of the demand series");
  gen->add_option("--initial", extra.initial, "Pedestrian initial volume range LO,HI")->delimiter(',');
  gen->add_option("--arrivals", extra.arrivals, "Pedestrian arrivals per interval LO,HI")->delimiter(',');
  gen->add_option("--alpha", extra.alpha, "Horizontal diversion ratio range LO,HI")->delimiter(',');
  gen->add_option("--gamma", extra.gamma, "Departure ratio range LO,HI")->delimiter(',');
  gen->add_option("--veh-initial", extra.veh_initial, "Vehicle initial volume range LO,HI")->delimiter(',');
  gen->add_option("--veh-inflow", extra.veh_inflow, "Boundary inflow per interval LO,HI")->delimiter(',');
  gen->add_flag("--no-vehicles", extra.no_vehicles, "Pedestrian layer only");

  CLI::App* simulate_cmd = sub("simulate", "Simulate a schedule and write traces");
  simulate_cmd->add_option("--schedule", extra.schedule, "Schedule CSV (default: all Horizontal)");

  CLI::App* exact = sub("solve-exact", "Exact optimum (per-junction search or joint weighted search)");
  CLI::App* dhs = sub("solve-dhs", "Discrete harmony search");
  add_dhs(dhs, extra);

  CLI::App* exp = sub("export-milp", "Write the pedestrian delay program as an LP file");
  CLI::App* check = sub("check-milp", "Evaluate every program row on a simulated trace");
  check->add_option("--schedule", extra.schedule, "Schedule CSV (default: all Horizontal)");
  check->add_option("--lp", extra.lp, "LP file that must match the scenario's program");

  CLI::App* mpc = sub("mpc-run", "Receding-horizon run");
  mpc->add_option("--intervals", extra.intervals, "Applied intervals T")->check(CLI::PositiveNumber);
  mpc->add_option("--noise", extra.noise, "Relative prediction noise on arrivals");
  mpc->add_option("--noise-seed", extra.noise_seed, "Seed of the prediction noise");
  add_solver(mpc, extra);
  add_dhs(mpc, extra);

  CLI::App* sweep = sub("sweep-weights", "Sweep the pedestrian weight of the joint objective");
  sweep->add_option("--max-weight", extra.max_weight, "Largest integer grid weight");
  sweep->add_flag("--refine", extra.refine, "Bisect between grid points to bracket turning weights");
  sweep->add_option("--resolution", extra.resolution, "Refinement resolution");
  add_solver(sweep, extra);
  add_dhs(sweep, extra);

  CLI::App* report = sub("report", "Scaling, gap and switching-frequency tables");
  report->add_option("--table", extra.table, "scaling | gap | sf | all")
      ->check(CLI::IsMember({"scaling", "gap", "sf", "all"}));
  report->add_option("--sizes", extra.sizes, "Square grid sizes")->delimiter(',');
  report->add_option("--horizons", extra.horizons, "Horizons in seconds")->delimiter(',');
  report->add_option("--seeds", extra.seeds, "Seeds 1..n per cell");
  add_dhs(report, extra);

  CLI::App* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("manifest", manifest_path, "manifest.json")->required();
  replay->add_option("--out", replay_out, "Output directory override");

  std::vector<std::string> storage;
  storage.emplace_back("pedsched");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (replay->parsed()) return run(replay_args(manifest_path, replay_out), out, err);

    CLI::App* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();
    const Common& c = common[name];
    Outputs o(c.out);
    if (chosen == gen) cmd_gen(c, extra, o, out);
    else if (chosen == simulate_cmd) cmd_simulate(c, extra, o, out);
    else if (chosen == exact) cmd_solve(c, extra, o, out, false);
    else if (chosen == dhs) cmd_solve(c, extra, o, out, true);
    else if (chosen == exp) cmd_export(c, extra, o, out);
    else if (chosen == check) cmd_check(c, extra, o, out);
    else if (chosen == mpc) cmd_mpc(c, extra, o, out);
    else if (chosen == sweep) cmd_sweep(c, extra, o, out);
    else if (chosen == report) cmd_report(c, extra, o, out);
    write_manifest(o, name, args, c);
    return kOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const SolverGuardError& e) {
    err << "guard: " << e.what() << '\n';
    return kGuard;
  } catch (const SaturationError& e) {
    err << "saturation: " << e.what() << '\n';
    return kGuard;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kFailure;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace pedsched::cli
