#include "pedsched/scenario_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace pedsched {

using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kSchema = "pedsched-scenario/1";

template <typename T>
void check_range(const Range<T>& r, T floor, T ceil, const char* what) {
  if (!(r.lo >= floor && r.hi <= ceil && r.lo <= r.hi)) {
    throw ValidationError(std::string("invalid ") + what + " range");
  }
}

double draw_ratio(Random& rng, const Range<double>& r) {
  const auto lo = static_cast<std::int64_t>(std::ceil(r.lo * 100.0 - 1e-9));
  const auto hi = static_cast<std::int64_t>(std::floor(r.hi * 100.0 + 1e-9));
  return static_cast<double>(rng.uniform_int(lo, hi)) / 100.0;
}

const char* stage_code(Stage s) { return s == Stage::Horizontal ? "H" : "V"; }

Stage parse_stage(const Json& j) {
  const std::string s = j.get<std::string>();
  if (s == "H") return Stage::Horizontal;
  if (s == "V") return Stage::Vertical;
  throw ValidationError("stage must be \"H\" or \"V\", got \"" + s + "\"");
}

template <typename T>
Json range_json(const Range<T>& r) {
  return Json::array({r.lo, r.hi});
}

template <typename T>
Range<T> range_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("ranges are [lo, hi] pairs");
  return {j[0].get<T>(), j[1].get<T>()};
}

Json generator_json(const GeneratorSpec& g) {
  Json j;
  j["seed"] = g.seed;
  j["rows"] = g.rows;
  j["cols"] = g.cols;
  j["steps"] = g.steps;
  j["demand_intervals"] = g.series_length();
  j["delta"] = g.delta;
  j["ped_initial"] = range_json(g.ped_initial);
  j["ped_arrivals"] = range_json(g.ped_arrivals);
  j["alpha"] = range_json(g.alpha);
  j["gamma"] = range_json(g.gamma);
  j["vehicles"] = g.vehicles;
  j["veh_initial"] = range_json(g.veh_initial);
  j["veh_inflow"] = range_json(g.veh_inflow);
  return j;
}

GeneratorSpec generator_from(const Json& j) {
  GeneratorSpec g;
  g.seed = j.at("seed").get<std::uint64_t>();
  g.rows = j.at("rows").get<int>();
  g.cols = j.at("cols").get<int>();
  g.steps = j.at("steps").get<int>();
  g.demand_intervals = j.at("demand_intervals").get<int>();
  g.delta = j.at("delta").get<double>();
  g.ped_initial = range_from<Count>(j.at("ped_initial"));
  g.ped_arrivals = range_from<Count>(j.at("ped_arrivals"));
  g.alpha = range_from<double>(j.at("alpha"));
  g.gamma = range_from<double>(j.at("gamma"));
  g.vehicles = j.at("vehicles").get<bool>();
  g.veh_initial = range_from<Count>(j.at("veh_initial"));
  g.veh_inflow = range_from<Count>(j.at("veh_inflow"));
  return g;
}

template <std::size_t N, typename T>
std::array<T, N> fixed_array(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != N) {
    throw ValidationError(std::string(what) + " needs " + std::to_string(N) + " entries");
  }
  std::array<T, N> a{};
  for (std::size_t i = 0; i < N; ++i) a[i] = j[i].get<T>();
  return a;
}

template <std::size_t N, typename T>
std::vector<std::array<T, N>> series(const Json& j, const char* what) {
  std::vector<std::array<T, N>> out;
  for (const Json& row : j) out.push_back(fixed_array<N, T>(row, what));
  return out;
}

}  // namespace

void GeneratorSpec::validate() const {
  if (rows < 1 || cols < 1) throw ValidationError("grid needs at least one row and column");
  if (steps < 1) throw ValidationError("steps must be at least 1");
  if (demand_intervals != 0 && demand_intervals < steps) {
    throw ValidationError("demand series shorter than the horizon");
  }
  if (!(delta > 0.0)) throw ValidationError("sampling interval must be positive");
  constexpr Count big = Count{1} << 40;
  check_range<Count>(ped_initial, 0, big, "pedestrian initial volume");
  check_range<Count>(ped_arrivals, 0, big, "pedestrian arrival");
  check_range<double>(alpha, 0.0, 1.0, "diversion ratio");
  check_range<double>(gamma, 0.0, 1.0, "departure ratio");
  check_range<Count>(veh_initial, 0, VehParams{}.max_volume, "vehicle initial volume");
  check_range<Count>(veh_inflow, 0, big, "vehicle inflow");
}

int Scenario::demand_intervals() const {
  int n = ped.junctions.empty() ? grid.steps
                                : static_cast<int>(ped.junctions.front().arrivals.size());
  for (const auto& d : ped.junctions) n = std::min(n, static_cast<int>(d.arrivals.size()));
  if (veh) {
    for (const auto& in : veh->inflow) {
      if (!in.empty()) n = std::min(n, static_cast<int>(in.size()));
    }
  }
  return n;
}

Scenario Scenario::with_steps(int steps) const {
  Scenario s = *this;
  s.grid.steps = steps;
  s.ped.steps = steps;
  if (s.veh) s.veh->grid.steps = steps;
  s.validate();
  return s;
}

void Scenario::validate() const {
  grid.validate();
  if (ped.junction_count() != grid.junctions()) {
    throw ValidationError("pedestrian demand must list every junction");
  }
  if (ped.steps != grid.steps || ped.delta != grid.delta) {
    throw ValidationError("pedestrian horizon disagrees with the grid");
  }
  ped.validate();
  if (veh) {
    if (veh->grid.n_h != grid.n_h || veh->grid.n_v != grid.n_v || veh->grid.steps != grid.steps ||
        veh->grid.delta != grid.delta) {
      throw ValidationError("vehicle grid disagrees with the scenario grid");
    }
    veh->validate(GridNetwork(grid));
  }
  coupling.validate();
}

Scenario generate_scenario(const GeneratorSpec& spec) {
  spec.validate();
  Random rng(spec.seed);
  Scenario s;
  s.grid = {spec.cols, spec.rows, spec.delta, spec.steps};
  s.ped.delta = spec.delta;
  s.ped.steps = spec.steps;
  const int T = spec.series_length();
  for (int j = 0; j < s.grid.junctions(); ++j) {
    PedJunctionDemand d;
    for (Count& c : d.initial) c = rng.uniform_int(spec.ped_initial.lo, spec.ped_initial.hi);
    for (int k = 0; k < T; ++k) {
      CornerCounts a{};
      CornerRatios al{}, ga{};
      for (std::size_t i = 0; i < kCornerCount; ++i) {
        a[i] = rng.uniform_int(spec.ped_arrivals.lo, spec.ped_arrivals.hi);
        al[i] = draw_ratio(rng, spec.alpha);
        ga[i] = draw_ratio(rng, spec.gamma);
      }
      d.arrivals.push_back(a);
      d.alpha.push_back(al);
      d.gamma.push_back(ga);
    }
    s.ped.junctions.push_back(std::move(d));
  }
  if (spec.vehicles) {
    const GridNetwork net(s.grid);
    VehScenario v;
    v.grid = s.grid;
    v.initial.resize(static_cast<std::size_t>(net.link_count()));
    v.inflow.resize(static_cast<std::size_t>(net.link_count()));
    for (const Link& l : net.links()) {
      v.initial[static_cast<std::size_t>(l.id)] =
          rng.uniform_int(spec.veh_initial.lo, spec.veh_initial.hi);
      if (!l.boundary()) continue;
      for (int k = 0; k < T; ++k) {
        v.inflow[static_cast<std::size_t>(l.id)].push_back(
            rng.uniform_int(spec.veh_inflow.lo, spec.veh_inflow.hi));
      }
    }
    s.veh = std::move(v);
  }
  s.generator = spec;
  s.validate();
  return s;
}

void write_scenario(std::ostream& out, const Scenario& s) {
  Json j;
  j["schema"] = kSchema;
  j["grid"] = {{"rows", s.grid.n_v}, {"cols", s.grid.n_h}, {"delta", s.grid.delta},
               {"steps", s.grid.steps}};

  const CrosswalkGeometry& g = s.ped.geometry;
  Json geo = {{"length", g.length}, {"width", g.width}, {"walk_speed", g.walk_speed},
              {"startup", g.startup}};
  if (g.waiting_zone_capacity) geo["waiting_zone_capacity"] = *g.waiting_zone_capacity;
  Json junctions = Json::array();
  for (const PedJunctionDemand& d : s.ped.junctions) {
    Json jd;
    jd["initial"] = d.initial;
    jd["arrivals"] = d.arrivals;
    jd["alpha"] = d.alpha;
    jd["gamma"] = d.gamma;
    jd["prev_stage"] = d.prev_stage ? Json(stage_code(*d.prev_stage)) : Json(nullptr);
    junctions.push_back(std::move(jd));
  }
  j["pedestrian"] = {{"geometry", geo}, {"junctions", junctions}};

  if (s.veh) {
    const VehParams& p = s.veh->params;
    Json hist = Json::array();
    for (const auto& h : s.veh->history) {
      Json row = Json::array();
      for (Stage st : h) row.push_back(stage_code(st));
      hist.push_back(row);
    }
    j["vehicle"] = {{"max_volume", p.max_volume},
                    {"levels", p.levels},
                    {"saturation", p.saturation},
                    {"travel_intervals", p.travel_intervals},
                    {"initial", s.veh->initial},
                    {"inflow", s.veh->inflow},
                    {"history", hist}};
  } else {
    j["vehicle"] = nullptr;
  }
  j["coupling"] = {{"mode", s.coupling.mode == CouplingMode::Exclusive ? "exclusive" : "relaxed"},
                   {"veh_for_ped",
                    {stage_code(s.coupling.veh_for_ped[0]), stage_code(s.coupling.veh_for_ped[1])}}};
  j["generator"] = s.generator ? generator_json(*s.generator) : Json(nullptr);
  out << j.dump(1) << '\n';
}

Scenario read_scenario(std::istream& in) {
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("scenario is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("schema").get<std::string>() != kSchema) {
      throw ValidationError("unsupported scenario schema " + j.at("schema").dump());
    }
    Scenario s;
    const Json& grid = j.at("grid");
    s.grid = {grid.at("cols").get<int>(), grid.at("rows").get<int>(),
              grid.at("delta").get<double>(), grid.at("steps").get<int>()};
    s.ped.delta = s.grid.delta;
    s.ped.steps = s.grid.steps;

    const Json& ped = j.at("pedestrian");
    const Json& geo = ped.at("geometry");
    s.ped.geometry.length = geo.at("length").get<double>();
    s.ped.geometry.width = geo.at("width").get<double>();
    s.ped.geometry.walk_speed = geo.at("walk_speed").get<double>();
    s.ped.geometry.startup = geo.at("startup").get<double>();
    if (geo.contains("waiting_zone_capacity")) {
      s.ped.geometry.waiting_zone_capacity = geo.at("waiting_zone_capacity").get<Count>();
    }
    for (const Json& jd : ped.at("junctions")) {
      PedJunctionDemand d;
      d.initial = fixed_array<kCornerCount, Count>(jd.at("initial"), "initial");
      d.arrivals = series<kCornerCount, Count>(jd.at("arrivals"), "arrivals");
      d.alpha = series<kCornerCount, double>(jd.at("alpha"), "alpha");
      d.gamma = series<kCornerCount, double>(jd.at("gamma"), "gamma");
      if (!jd.at("prev_stage").is_null()) d.prev_stage = parse_stage(jd.at("prev_stage"));
      s.ped.junctions.push_back(std::move(d));
    }

    const Json& veh = j.at("vehicle");
    if (!veh.is_null()) {
      VehScenario v;
      v.grid = s.grid;
      v.params.max_volume = veh.at("max_volume").get<Count>();
      v.params.levels = veh.at("levels").get<std::vector<double>>();
      v.params.saturation = veh.at("saturation").get<double>();
      v.params.travel_intervals = veh.at("travel_intervals").get<int>();
      v.initial = veh.at("initial").get<std::vector<Count>>();
      v.inflow = veh.at("inflow").get<std::vector<std::vector<Count>>>();
      for (const Json& row : veh.at("history")) {
        std::vector<Stage> h;
        for (const Json& st : row) h.push_back(parse_stage(st));
        v.history.push_back(std::move(h));
      }
      s.veh = std::move(v);
    }

    const Json& c = j.at("coupling");
    const std::string mode = c.at("mode").get<std::string>();
    if (mode == "exclusive") {
      s.coupling.mode = CouplingMode::Exclusive;
    } else if (mode == "relaxed") {
      s.coupling.mode = CouplingMode::Relaxed;
    } else {
      throw ValidationError("coupling mode must be exclusive or relaxed");
    }
    const Json& vp = c.at("veh_for_ped");
    if (!vp.is_array() || vp.size() != 2) throw ValidationError("veh_for_ped needs two stages");
    s.coupling.veh_for_ped = {parse_stage(vp[0]), parse_stage(vp[1])};

    if (!j.at("generator").is_null()) s.generator = generator_from(j.at("generator"));
    s.validate();
    return s;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("scenario schema violation: ") + e.what());
  }
}

void save_scenario(const std::filesystem::path& path, const Scenario& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_scenario(out, s);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read scenario " + path.string());
  return read_scenario(in);
}

}  // namespace pedsched
