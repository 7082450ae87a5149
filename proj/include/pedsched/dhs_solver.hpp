#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pedsched/objective.hpp"

namespace pedsched {

/// Discrete harmony search settings.  Defaults follow the case study.
struct DhsParams {
  int hms = 1000;     // memory size
  int ni = 1000;      // improvisations
  double hmcr = 0.95; // memory consideration rate
  double par = 0.5;   // pitch adjustment rate
  double bw = 1.0;    // flip probability of an adjusted bit
  void validate() const;
};

using Bits = std::vector<std::uint8_t>;
using BitCost = std::function<double(std::span<const std::uint8_t>)>;

struct DhsResult {
  Bits best;
  double best_cost = 0.0;
  /// Best cost in memory after each improvisation.
  std::vector<double> trace;
  long evaluations = 0;
};

/// Harmony search over {0,1}^n.  Each decision bit selects one of two
/// stages, so every vector is a valid schedule.
class HarmonySearch {
 public:
  HarmonySearch(int n, BitCost cost, DhsParams params, std::uint64_t seed);

  /// Fills the memory with HMS vectors, each element round(U[0,1)).
  void initialize();
  /// One candidate: per element, with probability HMCR copy that element of
  /// a uniformly chosen memory vector and then, with probability PAR, flip it
  /// with probability BW; otherwise draw a uniform bit.
  Bits improvise();
  /// Replaces the worst memory vector if `candidate` is strictly better.
  bool consider(const Bits& candidate);

  DhsResult run();

  const std::vector<Bits>& memory() const { return memory_; }
  const std::vector<double>& costs() const { return costs_; }
  /// Index of the best vector (lowest cost, lowest index on ties).
  std::size_t best_index() const;

 private:
  double evaluate(const Bits& b);

  int n_;
  BitCost cost_;
  DhsParams params_;
  Random rng_;
  std::vector<Bits> memory_;
  std::vector<double> costs_;
  long evaluations_ = 0;
};

/// Decision bit for (junction j, interval k) sits at j * N + k; 1 = Vertical.
Schedule bits_to_schedule(std::span<const std::uint8_t> bits, int junctions, int steps);
Bits schedule_to_bits(const Schedule& s);

struct DhsPedSolution {
  Schedule schedule;
  double cost = 0.0;
  std::vector<double> trace;
  long evaluations = 0;
};

/// Harmony search over every junction-interval of the network.  Costs are
/// summed per junction with a per-junction memo.
DhsPedSolution solve_dhs(const PedScenario& scenario, PedObjective objective,
                         const DhsParams& params, std::uint64_t seed,
                         const UnhappinessOptions& opts = {});

}  // namespace pedsched
