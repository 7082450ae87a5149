#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "pedsched/ped_dynamics.hpp"
#include "pedsched/topology.hpp"
#include "pedsched/veh_dynamics.hpp"

namespace pedsched {

/// Inclusive range for a generated quantity.
template <typename T>
struct Range {
  T lo{};
  T hi{};
};

/// Demand generator settings.  Counts are per interval; ratios are drawn on a
/// 0.01 grid so they survive a text round trip exactly.
struct GeneratorSpec {
  std::uint64_t seed = 1;
  int rows = 1;
  int cols = 1;
  int steps = 1;
  /// Length of the generated demand series; 0 means `steps`.
  int demand_intervals = 0;
  double delta = 15.0;
  Range<Count> ped_initial{0, 40};
  Range<Count> ped_arrivals{0, 10};
  Range<double> alpha{0.0, 1.0};
  Range<double> gamma{0.0, 0.5};
  bool vehicles = true;
  Range<Count> veh_initial{0, 50};
  Range<Count> veh_inflow{0, 30};

  int series_length() const { return demand_intervals > 0 ? demand_intervals : steps; }
  void validate() const;
};

/// Everything a command needs: grid, both layers and how they couple.
struct Scenario {
  GridSpec grid;
  PedScenario ped;
  std::optional<VehScenario> veh;
  StageCoupling coupling;
  std::optional<GeneratorSpec> generator;

  /// Demand series length shared by both layers.
  int demand_intervals() const;
  /// Copy with the horizon set to `steps` (demand must cover it).
  Scenario with_steps(int steps) const;
  void validate() const;
};

Scenario generate_scenario(const GeneratorSpec& spec);

void write_scenario(std::ostream& out, const Scenario& s);
/// Throws ValidationError on schema violations.
Scenario read_scenario(std::istream& in);

void save_scenario(const std::filesystem::path& path, const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace pedsched
