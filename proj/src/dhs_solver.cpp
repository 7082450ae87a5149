#include "pedsched/dhs_solver.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace pedsched {

void DhsParams::validate() const {
  if (hms < 1) throw ValidationError("HMS must be at least 1");
  if (ni < 1) throw ValidationError("NI must be at least 1");
  auto unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!unit(hmcr) || !unit(par)) throw ValidationError("HMCR and PAR must lie in [0, 1]");
  if (!(bw > 0.0 && bw <= 1.0)) throw ValidationError("BW must lie in (0, 1]");
}

HarmonySearch::HarmonySearch(int n, BitCost cost, DhsParams params, std::uint64_t seed)
    : n_(n), cost_(std::move(cost)), params_(params), rng_(seed) {
  params_.validate();
  if (n < 1) throw ValidationError("harmony vectors need at least one element");
}

double HarmonySearch::evaluate(const Bits& b) {
  ++evaluations_;
  return cost_(b);
}

void HarmonySearch::initialize() {
  memory_.assign(static_cast<std::size_t>(params_.hms), Bits(static_cast<std::size_t>(n_)));
  costs_.assign(static_cast<std::size_t>(params_.hms), 0.0);
  for (std::size_t h = 0; h < memory_.size(); ++h) {
    for (auto& x : memory_[h]) x = static_cast<std::uint8_t>(std::round(rng_.uniform01()));
    costs_[h] = evaluate(memory_[h]);
  }
}

Bits HarmonySearch::improvise() {
  Bits c(static_cast<std::size_t>(n_));
  for (std::size_t e = 0; e < c.size(); ++e) {
    if (rng_.uniform01() < params_.hmcr) {
      const auto pick = static_cast<std::size_t>(rng_.uniform_int(0, params_.hms - 1));
      c[e] = memory_[pick][e];
      if (rng_.uniform01() < params_.par && rng_.uniform01() < params_.bw) c[e] ^= 1U;
    } else {
      c[e] = rng_.bit() ? 1 : 0;
    }
  }
  return c;
}

std::size_t HarmonySearch::best_index() const {
  return static_cast<std::size_t>(std::min_element(costs_.begin(), costs_.end()) - costs_.begin());
}

bool HarmonySearch::consider(const Bits& candidate) {
  const double cost = evaluate(candidate);
  const auto worst =
      static_cast<std::size_t>(std::max_element(costs_.begin(), costs_.end()) - costs_.begin());
  if (!(cost < costs_[worst])) return false;
  memory_[worst] = candidate;
  costs_[worst] = cost;
  return true;
}

DhsResult HarmonySearch::run() {
  if (memory_.empty()) initialize();
  DhsResult r;
  r.trace.reserve(static_cast<std::size_t>(params_.ni));
  for (int it = 0; it < params_.ni; ++it) {
    consider(improvise());
    r.trace.push_back(costs_[best_index()]);
  }
  const std::size_t b = best_index();
  r.best = memory_[b];
  r.best_cost = costs_[b];
  r.evaluations = evaluations_;
  return r;
}

Schedule bits_to_schedule(std::span<const std::uint8_t> bits, int junctions, int steps) {
  if (bits.size() != static_cast<std::size_t>(junctions) * steps) {
    throw ValidationError("bit vector does not match the schedule shape");
  }
  Schedule s(junctions, steps);
  auto flat = s.flat();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    flat[i] = bits[i] ? Stage::Vertical : Stage::Horizontal;
  }
  return s;
}

Bits schedule_to_bits(const Schedule& s) {
  Bits b;
  for (Stage st : s.flat()) b.push_back(st == Stage::Vertical ? 1 : 0);
  return b;
}

DhsPedSolution solve_dhs(const PedScenario& scenario, PedObjective objective,
                         const DhsParams& params, std::uint64_t seed,
                         const UnhappinessOptions& opts) {
  scenario.validate();
  const int J = scenario.junction_count();
  const int N = scenario.steps;
  if (N > 63) throw SolverGuardError("per-junction memo keys hold at most 63 intervals");
  std::vector<std::unordered_map<std::uint64_t, double>> memo(static_cast<std::size_t>(J));
  std::vector<Stage> stages(static_cast<std::size_t>(N));

  auto cost = [&](std::span<const std::uint8_t> bits) {
    double total = 0.0;
    for (int j = 0; j < J; ++j) {
      std::uint64_t key = 0;
      for (int k = 0; k < N; ++k) {
        const std::uint8_t b = bits[static_cast<std::size_t>(j) * N + k];
        key = (key << 1) | b;
        stages[static_cast<std::size_t>(k)] = b ? Stage::Vertical : Stage::Horizontal;
      }
      auto& m = memo[static_cast<std::size_t>(j)];
      auto it = m.find(key);
      if (it == m.end()) it = m.emplace(key, junction_cost(scenario, j, stages, objective, opts)).first;
      total += it->second;
    }
    return total;
  };

  HarmonySearch hs(J * N, cost, params, seed);
  const DhsResult r = hs.run();
  return {bits_to_schedule(r.best, J, N), r.best_cost, r.trace, r.evaluations};
}

}  // namespace pedsched
