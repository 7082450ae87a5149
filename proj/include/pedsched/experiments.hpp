#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pedsched/dhs_solver.hpp"
#include "pedsched/scenario_io.hpp"

namespace pedsched {

/// Square grid size and horizon in seconds for one table cell.
struct Cell {
  int size = 3;
  int horizon_seconds = 30;
};

/// Generated square-grid pedestrian scenario for one cell and seed.  Demand
/// ranges come from `ranges`; its grid, seed and horizon fields are ignored.
Scenario cell_scenario(const Cell& cell, std::uint64_t seed, const GeneratorSpec& ranges = {});

/// Cells for every size/horizon pair.  Horizons must be multiples of delta.
std::vector<Cell> cells(const std::vector<int>& sizes, const std::vector<int>& horizons_seconds,
                        double delta = 15.0);

struct ScalingRow {
  Cell cell;
  int steps = 0;
  double objective = 0.0;   // exact network delay
  int variables = 0;        // generated MILP
  int constraints = 0;
  int binaries = 0;
  std::string method;
  double seconds = 0.0;     // wall time of the exact solve; kept out of CSV
};

std::vector<ScalingRow> scaling_table(const std::vector<Cell>& cells, std::uint64_t seed,
                                      int threads = 0, const GeneratorSpec& ranges = {});

struct GapRow {
  Cell cell;
  std::uint64_t seed = 0;
  double exact = 0.0;
  double dhs = 0.0;
  double gap = 0.0;  // (dhs - exact) / exact; 0 when both are 0
  double dhs_seconds = 0.0;
};

std::vector<GapRow> gap_table(const std::vector<Cell>& cells, const std::vector<std::uint64_t>& seeds,
                              const DhsParams& params, int threads = 0,
                              const GeneratorSpec& ranges = {});

struct GapSummary {
  Cell cell;
  double median = 0.0;
  double max = 0.0;
};
std::vector<GapSummary> summarize_gaps(const std::vector<GapRow>& rows);

struct SfRow {
  Cell cell;
  std::uint64_t seed = 0;
  double sf_delay = 0.0;
  double sf_unhappiness = 0.0;
};

/// Profile switching frequency of the exact optimum under each objective.
std::vector<SfRow> sf_comparison(const std::vector<Cell>& cells,
                                 const std::vector<std::uint64_t>& seeds, int threads = 0,
                                 const GeneratorSpec& ranges = {});

void write_scaling_csv(std::ostream& out, const std::vector<ScalingRow>& rows);
void write_gap_csv(std::ostream& out, const std::vector<GapRow>& rows);
void write_sf_csv(std::ostream& out, const std::vector<SfRow>& rows);

}  // namespace pedsched
