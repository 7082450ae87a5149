#include "pedsched/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "pedsched/exact_solver.hpp"
#include "pedsched/integration.hpp"
#include "pedsched/milp_build.hpp"

namespace pedsched {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int steps_for(const Cell& c, double delta) {
  const double n = c.horizon_seconds / delta;
  if (n < 1.0 || std::abs(n - std::round(n)) > 1e-9) {
    throw ValidationError("horizon " + std::to_string(c.horizon_seconds) +
                          " s is not a positive multiple of the interval");
  }
  return static_cast<int>(std::lround(n));
}

}  // namespace

Scenario cell_scenario(const Cell& cell, std::uint64_t seed, const GeneratorSpec& ranges) {
  if (cell.size < 1) throw ValidationError("grid size must be positive");
  GeneratorSpec g = ranges;
  g.seed = seed;
  g.rows = cell.size;
  g.cols = cell.size;
  g.steps = steps_for(cell, g.delta);
  g.demand_intervals = 0;
  g.vehicles = false;
  return generate_scenario(g);
}

std::vector<Cell> cells(const std::vector<int>& sizes, const std::vector<int>& horizons,
                        double delta) {
  std::vector<Cell> out;
  for (int s : sizes) {
    for (int h : horizons) {
      const Cell c{s, h};
      (void)steps_for(c, delta);
      out.push_back(c);
    }
  }
  return out;
}

std::vector<ScalingRow> scaling_table(const std::vector<Cell>& cs, std::uint64_t seed, int threads,
                                      const GeneratorSpec& ranges) {
  std::vector<ScalingRow> rows(cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const Scenario s = cell_scenario(cs[i], seed, ranges);
    ScalingRow& r = rows[i];
    r.cell = cs[i];
    r.steps = s.grid.steps;
    ExactOptions eo;
    eo.threads = threads;
    const auto t0 = std::chrono::steady_clock::now();
    r.objective = solve_exact_network(s.ped, PedObjective::Delay, eo).cost;
    r.seconds = seconds_since(t0);
    r.method = "exact-decomposed";
    const PedMilp milp = build_milp(s.ped);
    r.variables = milp.model.variable_count();
    r.constraints = milp.model.constraint_count();
    r.binaries = milp.model.count(VarKind::Binary);
  }
  return rows;
}

std::vector<GapRow> gap_table(const std::vector<Cell>& cs, const std::vector<std::uint64_t>& seeds,
                              const DhsParams& params, int threads,
                              const GeneratorSpec& ranges) {
  std::vector<GapRow> rows;
  for (const Cell& c : cs) {
    for (std::uint64_t seed : seeds) rows.push_back({c, seed});
  }
  parallel_for(static_cast<int>(rows.size()), threads, [&](int i) {
    GapRow& r = rows[static_cast<std::size_t>(i)];
    const Scenario s = cell_scenario(r.cell, r.seed, ranges);
    ExactOptions eo;
    eo.threads = 1;
    r.exact = solve_exact_network(s.ped, PedObjective::Delay, eo).cost;
    const auto t0 = std::chrono::steady_clock::now();
    r.dhs = solve_dhs(s.ped, PedObjective::Delay, params, r.seed).cost;
    r.dhs_seconds = seconds_since(t0);
    r.gap = r.exact > 0.0 ? (r.dhs - r.exact) / r.exact : 0.0;
  });
  return rows;
}

std::vector<GapSummary> summarize_gaps(const std::vector<GapRow>& rows) {
  std::vector<GapSummary> out;
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t e = i;
    std::vector<double> g;
    while (e < rows.size() && rows[e].cell.size == rows[i].cell.size &&
           rows[e].cell.horizon_seconds == rows[i].cell.horizon_seconds) {
      g.push_back(rows[e].gap);
      ++e;
    }
    std::sort(g.begin(), g.end());
    const std::size_t n = g.size();
    const double median = n % 2 ? g[n / 2] : (g[n / 2 - 1] + g[n / 2]) / 2.0;
    out.push_back({rows[i].cell, median, g.back()});
    i = e;
  }
  return out;
}

std::vector<SfRow> sf_comparison(const std::vector<Cell>& cs,
                                 const std::vector<std::uint64_t>& seeds, int threads,
                                 const GeneratorSpec& ranges) {
  std::vector<SfRow> rows;
  for (const Cell& c : cs) {
    for (std::uint64_t seed : seeds) rows.push_back({c, seed});
  }
  parallel_for(static_cast<int>(rows.size()), threads, [&](int i) {
    SfRow& r = rows[static_cast<std::size_t>(i)];
    const Scenario s = cell_scenario(r.cell, r.seed, ranges);
    ExactOptions eo;
    eo.threads = 1;
    r.sf_delay =
        switching_frequency_profile(solve_exact_network(s.ped, PedObjective::Delay, eo).schedule);
    r.sf_unhappiness = switching_frequency_profile(
        solve_exact_network(s.ped, PedObjective::Unhappiness, eo).schedule);
  });
  return rows;
}

void write_scaling_csv(std::ostream& out, const std::vector<ScalingRow>& rows) {
  out << "size,horizon_s,steps,objective,variables,constraints,binaries,method\n";
  for (const ScalingRow& r : rows) {
    out << r.cell.size << ',' << r.cell.horizon_seconds << ',' << r.steps << ','
        << format_number(r.objective) << ',' << r.variables << ',' << r.constraints << ','
        << r.binaries << ',' << r.method << '\n';
  }
}

void write_gap_csv(std::ostream& out, const std::vector<GapRow>& rows) {
  out << "size,horizon_s,seed,exact,dhs,gap\n";
  for (const GapRow& r : rows) {
    out << r.cell.size << ',' << r.cell.horizon_seconds << ',' << r.seed << ','
        << format_number(r.exact) << ',' << format_number(r.dhs) << ',' << format_number(r.gap)
        << '\n';
  }
}

void write_sf_csv(std::ostream& out, const std::vector<SfRow>& rows) {
  out << "size,horizon_s,seed,sf_delay,sf_unhappiness\n";
  for (const SfRow& r : rows) {
    out << r.cell.size << ',' << r.cell.horizon_seconds << ',' << r.seed << ','
        << format_number(r.sf_delay) << ',' << format_number(r.sf_unhappiness) << '\n';
  }
}

}  // namespace pedsched
