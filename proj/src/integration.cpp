#include "pedsched/integration.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <utility>

#include "pedsched/exact_solver.hpp"

namespace pedsched {

__extension__ using Wide = __int128;

// ---------------------------------------------------------------- Weight

Weight Weight::reduced() const {
  if (den <= 0 || num < 0) throw ValidationError("weights must be non-negative fractions");
  const std::int64_t g = std::gcd(num, den);
  return g > 1 ? Weight{num / g, den / g} : *this;
}

bool operator==(const Weight& a, const Weight& b) {
  return static_cast<Wide>(a.num) * b.den == static_cast<Wide>(b.num) * a.den;
}

bool operator<(const Weight& a, const Weight& b) {
  return static_cast<Wide>(a.num) * b.den < static_cast<Wide>(b.num) * a.den;
}

Weight Weight::midpoint(const Weight& a, const Weight& b) {
  Wide n = static_cast<Wide>(a.num) * b.den + static_cast<Wide>(b.num) * a.den;
  Wide d = static_cast<Wide>(a.den) * b.den * 2;
  Wide x = n, y = d;
  while (y != 0) x = std::exchange(y, x % y);
  if (x > 1) {
    n /= x;
    d /= x;
  }
  if (d > INT64_MAX || n > INT64_MAX) throw ValidationError("weight bisection exceeded precision");
  return {static_cast<std::int64_t>(n), static_cast<std::int64_t>(d)};
}

std::string Weight::to_string() const {
  const Weight w = reduced();
  if (w.den == 1) return std::to_string(w.num);
  // Finite decimal when the denominator divides a power of ten.
  Wide scale = 1;
  for (int digits = 1; digits <= 18; ++digits) {
    scale *= 10;
    if (scale % w.den == 0) {
      const Wide scaled = static_cast<Wide>(w.num) * (scale / w.den);
      const auto whole = static_cast<std::int64_t>(scaled / scale);
      std::string frac = std::to_string(static_cast<std::int64_t>(scaled % scale));
      frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
      while (!frac.empty() && frac.back() == '0') frac.pop_back();
      return std::to_string(whole) + "." + frac;
    }
  }
  return std::to_string(w.num) + "/" + std::to_string(w.den);
}

namespace {

std::int64_t parse_int(std::string_view s, const std::string& whole) {
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size() || v < 0) {
    throw ValidationError("invalid weight \"" + whole + "\"");
  }
  return v;
}

}  // namespace

Weight Weight::parse(const std::string& s) {
  const std::string_view v(s);
  if (const auto slash = v.find('/'); slash != std::string_view::npos) {
    const Weight w{parse_int(v.substr(0, slash), s), parse_int(v.substr(slash + 1), s)};
    if (w.den == 0) throw ValidationError("invalid weight \"" + s + "\"");
    return w.reduced();
  }
  const auto dot = v.find('.');
  if (dot == std::string_view::npos) return {parse_int(v, s), 1};
  const std::string_view frac = v.substr(dot + 1);
  if (frac.size() > 12) throw ValidationError("weight \"" + s + "\" has too many decimals");
  std::int64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  const std::int64_t whole = dot == 0 ? 0 : parse_int(v.substr(0, dot), s);
  const std::int64_t part = frac.empty() ? 0 : parse_int(frac, s);
  return Weight{whole * den + part, den}.reduced();
}

// ---------------------------------------------------------------- search

namespace {

/// Sorting key of U_D scaled by |V max| * |P max| * den.
Wide weighted_key(Count ped, Count veh, Count ped_max, Count veh_max, const Weight& m) {
  return static_cast<Wide>(veh) * ped_max * m.den + static_cast<Wide>(m.num) * ped * veh_max;
}

}  // namespace

/// Depth-first walk over joint decisions in time-major order, rolling both
/// simulators forward incrementally.
class JointSearch {
 public:
  enum class Mode { Enumerate, Minimize, MaximizeVehicle };

  explicit JointSearch(const WeightedProblem& p)
      : p_(p),
        ped_model_(p.ped_.geometry, p.ped_.delta),
        veh_model_(p.net_, p.veh_),
        J_(p.junctions()),
        D_(p.decisions()),
        column_(static_cast<std::size_t>(J_)),
        path_(static_cast<std::size_t>(D_)),
        levels_(static_cast<std::size_t>(D_) + 1) {
    Level& root = levels_[0];
    for (const PedJunctionDemand& d : p.ped_.junctions) {
      root.ped_volume.push_back(d.initial);
      root.ped_prev.push_back(d.prev_stage);
    }
    root.veh = VehState::initial(p.net_, p.veh_);
  }

  void enumerate(std::vector<JointCosts>& table) {
    mode_ = Mode::Enumerate;
    table.assign(std::size_t{1} << D_, {});
    table_ = &table;
    visit(0, 0);
  }

  void minimize(const Weight& m, long budget) {
    mode_ = Mode::Minimize;
    weight_ = m;
    budget_ = budget;
    // Vehicle step delays are C - travel * s, non-negative only when a link
    // is crossed within one interval.
    prune_ = p_.veh_.params.travel_intervals <= 1;
    visit(0, 0);
  }

  void maximize_vehicle(long budget) {
    mode_ = Mode::MaximizeVehicle;
    budget_ = budget;
    visit(0, 0);
  }

  bool found() const { return have_; }
  std::uint64_t best_rank() const { return best_rank_; }
  JointCosts best_costs() const { return best_; }
  long nodes() const { return nodes_; }
  bool complete() const { return !exhausted_; }

 private:
  struct Level {
    std::vector<CornerCounts> ped_volume;
    std::vector<std::optional<Stage>> ped_prev;
    VehState veh;
    Count ped_units = 0;
    Count veh_units = 0;
  };

  Wide key(Count ped, Count veh) const {
    return weighted_key(ped, veh, p_.ped_max_, p_.veh_max_, weight_);
  }

  void leaf(std::uint64_t rank, const Level& l) {
    switch (mode_) {
      case Mode::Enumerate:
        (*table_)[rank] = {l.ped_units, l.veh_units};
        return;
      case Mode::Minimize:
        if (!have_ || key(l.ped_units, l.veh_units) < key(best_.ped_units, best_.veh_units)) break;
        return;
      case Mode::MaximizeVehicle:
        if (!have_ || l.veh_units > best_.veh_units) break;
        return;
    }
    have_ = true;
    best_rank_ = rank;
    best_ = {l.ped_units, l.veh_units};
  }

  void visit(int d, std::uint64_t rank) {
    ++nodes_;
    const Level& cur = levels_[static_cast<std::size_t>(d)];
    if (d == D_) {
      leaf(rank, cur);
      return;
    }
    if (mode_ != Mode::Enumerate && nodes_ > budget_) {
      exhausted_ = true;
      return;
    }
    const int k = d / J_;
    const int j = d % J_;
    const auto ju = static_cast<std::size_t>(j);
    const auto ku = static_cast<std::size_t>(k);
    const PedJunctionDemand& demand = p_.ped_.junctions[ju];
    for (Stage o : {Stage::Horizontal, Stage::Vertical}) {
      Level& next = levels_[static_cast<std::size_t>(d) + 1];
      next = cur;
      const PedStep step = ped_model_.advance(next.ped_volume[ju], next.ped_prev[ju], o,
                                              demand.arrivals[ku], demand.alpha[ku],
                                              demand.gamma[ku]);
      next.ped_prev[ju] = o;
      next.ped_units += step.delay_units();
      path_[static_cast<std::size_t>(d)] = o;
      if (j == J_ - 1) {
        for (int i = 0; i < J_; ++i) {
          column_[static_cast<std::size_t>(i)] =
              p_.coupling_.vehicle_stage(path_[static_cast<std::size_t>(k * J_ + i)]);
        }
        next.veh_units += veh_model_.advance(next.veh, column_, k).delay_units;
      }
      if (mode_ == Mode::Minimize && prune_ && have_ &&
          key(next.ped_units, next.veh_units) >= key(best_.ped_units, best_.veh_units)) {
        continue;
      }
      visit(d + 1, (rank << 1) | static_cast<std::uint64_t>(index(o)));
      if (exhausted_) return;
    }
  }

  const WeightedProblem& p_;
  PedModel ped_model_;
  VehModel veh_model_;
  int J_;
  int D_;
  std::vector<Stage> column_;
  std::vector<Stage> path_;  // pedestrian stage chosen at each decision
  std::vector<Level> levels_;
  Mode mode_ = Mode::Enumerate;
  std::vector<JointCosts>* table_ = nullptr;
  Weight weight_;
  long budget_ = 0;
  bool prune_ = false;
  bool have_ = false;
  bool exhausted_ = false;
  std::uint64_t best_rank_ = 0;
  JointCosts best_;
  long nodes_ = 0;
};

// ---------------------------------------------------------------- problem

WeightedProblem::WeightedProblem(PedScenario ped, VehScenario veh, StageCoupling coupling,
                                 IntegrationOptions options)
    : ped_(std::move(ped)),
      veh_(std::move(veh)),
      net_(veh_.grid),
      coupling_(coupling),
      options_(options) {
  ped_.validate();
  veh_.validate(net_);
  coupling_.validate();
  if (coupling_.mode != CouplingMode::Exclusive) {
    throw ValidationError("joint search covers exclusive coupling only");
  }
  if (ped_.junction_count() != net_.junction_count() || ped_.steps != veh_.grid.steps ||
      ped_.delta != veh_.grid.delta) {
    throw ValidationError("pedestrian and vehicle layers disagree on grid or horizon");
  }
  if (decisions() > 62) throw SolverGuardError("joint decision vector longer than 62 bits");

  if (decisions() <= options_.max_joint_bits) {
    JointSearch(*this).enumerate(table_);
    for (const JointCosts& c : table_) {
      ped_max_ = std::max(ped_max_, c.ped_units);
      veh_max_ = std::max(veh_max_, c.veh_units);
    }
  } else {
    // Pedestrian junctions stay independent under the coupling, so the
    // decomposed maximum is the coupled one.
    ExactOptions eo;
    eo.threads = options_.threads;
    ped_max_ = std::llround(maximize_cost(ped_, PedObjective::Delay, eo) / ped_.delta);
    JointSearch s(*this);
    s.maximize_vehicle(options_.node_budget);
    veh_max_ = s.best_costs().veh_units;
    certified_ = s.complete();
  }
  if (ped_max_ <= 0 || veh_max_ <= 0) {
    throw ValidationError("degenerate scenario: a layer has zero maximum delay");
  }
}

Schedule WeightedProblem::ped_schedule(std::uint64_t rank) const {
  const int J = junctions();
  const int D = decisions();
  Schedule s(J, steps());
  for (int d = 0; d < D; ++d) {
    const bool v = (rank >> (D - 1 - d)) & 1U;
    s.set(d % J, d / J, v ? Stage::Vertical : Stage::Horizontal);
  }
  return s;
}

std::uint64_t WeightedProblem::rank_of(const Schedule& s) const {
  std::uint64_t rank = 0;
  for (int k = 0; k < steps(); ++k) {
    for (int j = 0; j < junctions(); ++j) rank = (rank << 1) | static_cast<unsigned>(index(s.at(j, k)));
  }
  return rank;
}

Schedule WeightedProblem::veh_schedule(const Schedule& ped_schedule) const {
  Schedule v(ped_schedule.junctions(), ped_schedule.steps());
  for (int j = 0; j < v.junctions(); ++j) {
    for (int k = 0; k < v.steps(); ++k) v.set(j, k, coupling_.vehicle_stage(ped_schedule.at(j, k)));
  }
  return v;
}

JointCosts WeightedProblem::evaluate(const Schedule& s) const {
  return {delay_units(simulate(ped_, s)),
          vehicle_delay_units(simulate_veh(net_, veh_, veh_schedule(s)))};
}

ScaledCost scaled_cost(const WeightedProblem& p, const JointCosts& c, const Weight& m) {
  if (p.ped_max_units() <= 0 || p.veh_max_units() <= 0) {
    throw ValidationError("scaling needs positive maximum delays");
  }
  ScaledCost s;
  s.ped_ratio = static_cast<double>(c.ped_units) / static_cast<double>(p.ped_max_units());
  s.veh_ratio = static_cast<double>(c.veh_units) / static_cast<double>(p.veh_max_units());
  s.u_d = s.veh_ratio + m.value() * s.ped_ratio;
  return s;
}

int compare_weighted(const WeightedProblem& p, const JointCosts& a, const JointCosts& b,
                     const Weight& m) {
  const Wide ka = weighted_key(a.ped_units, a.veh_units, p.ped_max_units(), p.veh_max_units(), m);
  const Wide kb = weighted_key(b.ped_units, b.veh_units, p.ped_max_units(), p.veh_max_units(), m);
  return ka < kb ? -1 : (ka > kb ? 1 : 0);
}

bool joint_feasible(const ThetaBits& ped, const ThetaBits& veh, const StageCoupling& coupling) {
  if (ped.junctions != veh.junctions || ped.steps != veh.steps) return false;
  const auto modes = coupling.joint_modes();
  for (int j = 0; j < ped.junctions; ++j) {
    for (int k = 0; k < ped.steps; ++k) {
      int active = 0;
      std::array<bool, kStageCount> ped_cov{}, veh_cov{};
      for (const auto& m : modes) {
        if (ped.at(j, k, m.ped) && veh.at(j, k, m.veh)) {
          ++active;
          ped_cov[static_cast<std::size_t>(index(m.ped))] = true;
          veh_cov[static_cast<std::size_t>(index(m.veh))] = true;
        }
      }
      for (Stage o : {Stage::Horizontal, Stage::Vertical}) {
        const auto ou = static_cast<std::size_t>(index(o));
        if ((ped.at(j, k, o) && !ped_cov[ou]) || (veh.at(j, k, o) && !veh_cov[ou])) return false;
      }
      if (coupling.mode == CouplingMode::Exclusive ? active != 1 : active > 1) return false;
    }
  }
  return true;
}

bool joint_feasible(const Schedule& ped, const Schedule& veh, const StageCoupling& coupling) {
  return joint_feasible(ped.theta(), veh.theta(), coupling);
}

JointSolution solve_weighted(const WeightedProblem& p, const Weight& m,
                             const WeightedSolveOptions& options) {
  const Weight w = m.reduced();
  JointSolution sol;
  sol.weight = w;
  std::uint64_t rank = 0;
  if (options.solver == JointSolver::Dhs) {
    auto cost = [&](std::span<const std::uint8_t> bits) {
      std::uint64_t r = 0;
      for (std::uint8_t b : bits) r = (r << 1) | b;
      const JointCosts c = p.tabulated() ? p.table()[r] : p.evaluate(p.ped_schedule(r));
      return scaled_cost(p, c, w).u_d;
    };
    HarmonySearch hs(p.decisions(), cost, options.dhs, options.seed);
    const DhsResult r = hs.run();
    for (std::uint8_t b : r.best) rank = (rank << 1) | b;
    sol.certified = false;
    sol.nodes = r.evaluations;
    sol.costs = p.tabulated() ? p.table()[rank] : p.evaluate(p.ped_schedule(rank));
  } else if (p.tabulated()) {
    const auto& t = p.table();
    for (std::uint64_t r = 1; r < t.size(); ++r) {
      if (compare_weighted(p, t[r], t[rank], w) < 0) rank = r;
    }
    sol.costs = t[rank];
    sol.nodes = static_cast<long>(t.size());
    sol.certified = p.certified();
  } else {
    JointSearch s(p);
    s.minimize(w, p.options().node_budget);
    rank = s.best_rank();
    sol.costs = s.best_costs();
    sol.nodes = s.nodes();
    sol.certified = s.complete() && p.certified();
  }
  sol.ped_schedule = p.ped_schedule(rank);
  sol.veh_schedule = p.veh_schedule(sol.ped_schedule);
  return sol;
}

VehicleOptimum vehicle_optimum(const GridNetwork& net, const VehScenario& veh, int max_bits) {
  const int J = net.junction_count();
  const int N = veh.grid.steps;
  const int D = J * N;
  if (D > max_bits) {
    throw SolverGuardError("vehicle schedule space of " + std::to_string(D) +
                           " bits exceeds the guard");
  }
  VehicleOptimum best;
  Schedule s(J, N);
  for (std::uint64_t rank = 0; rank < (std::uint64_t{1} << D); ++rank) {
    for (int d = 0; d < D; ++d) {
      s.set(d % J, d / J, (rank >> (D - 1 - d)) & 1U ? Stage::Vertical : Stage::Horizontal);
    }
    const Count units = vehicle_delay_units(simulate_veh(net, veh, s));
    if (rank == 0 || units < best.units) {
      best.units = units;
      best.schedule = s;
    }
  }
  return best;
}

SaturationPoint saturation_weight(const WeightedProblem& p) {
  if (!p.tabulated()) throw SolverGuardError("saturation weight needs a tabulated problem");
  const auto& t = p.table();
  std::uint64_t s = 0;
  for (std::uint64_t r = 1; r < t.size(); ++r) {
    if (t[r].ped_units < t[s].ped_units ||
        (t[r].ped_units == t[s].ped_units && t[r].veh_units < t[s].veh_units)) {
      s = r;
    }
  }
  SaturationPoint out;
  out.rank = s;
  out.costs = t[s];
  Wide best_num = 0, best_den = 1;
  for (const JointCosts& c : t) {
    if (c.ped_units <= t[s].ped_units || c.veh_units >= t[s].veh_units) continue;
    const Wide num = static_cast<Wide>(t[s].veh_units - c.veh_units) * p.ped_max_units();
    const Wide den = static_cast<Wide>(c.ped_units - t[s].ped_units) * p.veh_max_units();
    if (num * best_den > best_num * den) {
      best_num = num;
      best_den = den;
    }
  }
  const auto g = std::gcd(static_cast<std::int64_t>(best_num), static_cast<std::int64_t>(best_den));
  out.weight = {static_cast<std::int64_t>(best_num) / g, static_cast<std::int64_t>(best_den) / g};
  return out;
}

// ---------------------------------------------------------------- sweeps

std::vector<Weight> integer_grid(int hi) {
  std::vector<Weight> g;
  for (int m = 0; m <= hi; ++m) g.push_back(Weight::integer(m));
  return g;
}

namespace {

void bisect(const WeightedProblem& p, const JointSolution& a, const JointSolution& b,
            const SweepOptions& o, std::vector<JointSolution>& out) {
  if (a.ped_schedule == b.ped_schedule) return;
  // Stop once b - a <= resolution.
  const Wide gap = static_cast<Wide>(b.weight.num) * a.weight.den -
                   static_cast<Wide>(a.weight.num) * b.weight.den;
  if (gap * o.resolution.den <=
      static_cast<Wide>(o.resolution.num) * a.weight.den * b.weight.den) {
    return;
  }
  JointSolution mid = solve_weighted(p, Weight::midpoint(a.weight, b.weight), o.solve);
  bisect(p, a, mid, o, out);
  bisect(p, mid, b, o, out);
  out.push_back(std::move(mid));
}

}  // namespace

SweepResult sweep_weights(const WeightedProblem& p, const std::vector<Weight>& grid,
                          const SweepOptions& options) {
  if (grid.empty() || !(grid.front() == Weight{0, 1})) {
    throw ValidationError("weight grid must start at 0");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i - 1] < grid[i])) throw ValidationError("weight grid must be strictly ascending");
  }
  if (options.resolution.num <= 0) throw ValidationError("refinement resolution must be positive");

  std::vector<JointSolution> sols(grid.size());
  parallel_for(static_cast<int>(grid.size()), p.options().threads, [&](int i) {
    sols[static_cast<std::size_t>(i)] =
        solve_weighted(p, grid[static_cast<std::size_t>(i)], options.solve);
  });
  if (options.refine) {
    std::vector<JointSolution> extra;
    for (std::size_t i = 1; i < sols.size(); ++i) bisect(p, sols[i - 1], sols[i], options, extra);
    for (auto& e : extra) sols.push_back(std::move(e));
    std::sort(sols.begin(), sols.end(),
              [](const JointSolution& a, const JointSolution& b) { return a.weight < b.weight; });
  }

  SweepResult r;
  for (std::size_t i = 0; i < sols.size(); ++i) {
    SweepPoint pt;
    pt.scaled = scaled_cost(p, sols[i].costs, sols[i].weight);
    if (i > 0) {
      const JointSolution& prev = r.points.back().solution;
      pt.sf_turning = switching_frequency_turning(prev.veh_schedule, sols[i].veh_schedule);
      pt.turning = prev.ped_schedule != sols[i].ped_schedule;
    }
    r.certified = r.certified && sols[i].certified;
    pt.solution = std::move(sols[i]);
    if (pt.turning) {
      r.turning_weights.push_back(pt.solution.weight);
      r.sf_at_turning.push_back(pt.sf_turning);
    }
    r.points.push_back(std::move(pt));
  }
  return r;
}

double switching_frequency_profile(const Schedule& s) {
  if (s.steps() < 2) throw ValidationError("switching frequency needs at least two intervals");
  if (s.junctions() < 1) throw ValidationError("switching frequency needs a junction");
  long changed = 0;
  for (int j = 0; j < s.junctions(); ++j) {
    for (int k = 1; k < s.steps(); ++k) changed += s.at(j, k) != s.at(j, k - 1);
  }
  return static_cast<double>(changed) / (static_cast<double>(s.junctions()) * (s.steps() - 1));
}

double switching_frequency_turning(const Schedule& before, const Schedule& after) {
  if (before.junctions() != after.junctions() || before.steps() != after.steps()) {
    throw ValidationError("switching frequency compares schedules of equal shape");
  }
  const auto a = before.flat();
  const auto b = after.flat();
  if (a.empty()) throw ValidationError("switching frequency needs a non-empty schedule");
  long changed = 0;
  for (std::size_t i = 0; i < a.size(); ++i) changed += a[i] != b[i];
  return static_cast<double>(changed) / static_cast<double>(a.size());
}

void write_sweep_csv(std::ostream& out, const SweepResult& r) {
  out << "weight,U_D,P_D_ratio,V_D_ratio,schedule_hash,SF_turning\n";
  char hash[17];
  for (const SweepPoint& pt : r.points) {
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(pt.solution.veh_schedule.hash()));
    out << pt.solution.weight.to_string() << ',' << format_number(pt.scaled.u_d) << ','
        << format_number(pt.scaled.ped_ratio) << ',' << format_number(pt.scaled.veh_ratio) << ','
        << hash << ',' << format_number(pt.sf_turning) << '\n';
  }
}

}  // namespace pedsched
