#include "pedsched/exact_solver.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace pedsched {

namespace {

void check_horizon(int steps, const ExactOptions& options) {
  if (steps > options.max_steps) {
    throw SolverGuardError("horizon of " + std::to_string(steps) + " intervals exceeds the " +
                           std::to_string(options.max_steps) + "-interval enumeration guard");
  }
}

/// Stage sequence for the lexicographic rank `mask` (first interval is the
/// most significant bit).
void decode(std::uint64_t mask, std::span<Stage> out) {
  const std::size_t n = out.size();
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = (mask >> (n - 1 - k)) & 1U ? Stage::Vertical : Stage::Horizontal;
  }
}

template <typename Better>
JunctionSolution scan_junction(const PedScenario& scenario, int j, PedObjective objective,
                               const ExactOptions& options, Better better) {
  const int n = scenario.steps;
  check_horizon(n, options);
  JunctionSolution best;
  std::vector<Stage> stages(static_cast<std::size_t>(n));
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    decode(mask, stages);
    const double cost = junction_cost(scenario, j, stages, objective, options.unhappiness);
    if (mask == 0 || better(cost, best.cost)) {
      best.cost = cost;
      best.stages = stages;
    }
  }
  best.nodes = static_cast<long>(count);
  return best;
}

class BranchAndBound {
 public:
  BranchAndBound(const PedScenario& s, int j, PedObjective objective, const ExactOptions& options,
                 bool prune)
      : scenario_(s),
        demand_(s.junctions.at(static_cast<std::size_t>(j))),
        model_(s.geometry, s.delta),
        objective_(objective),
        options_(options),
        prune_(prune) {}

  JunctionSolution run() {
    check_horizon(scenario_.steps, options_);
    Node root{demand_.initial, demand_.prev_stage, 0,
              UnhappinessAccumulator(scenario_.delta, options_.unhappiness)};
    std::vector<Stage> prefix;
    prefix.reserve(static_cast<std::size_t>(scenario_.steps));
    visit(0, root, prefix);
    best_.nodes = nodes_;
    return best_;
  }

 private:
  struct Node {
    CornerCounts volume;
    std::optional<Stage> prev;
    Count delay_units;
    UnhappinessAccumulator acc;
  };

  double accumulated(const Node& n) const {
    return objective_ == PedObjective::Delay
               ? static_cast<double>(n.delay_units) * scenario_.delta
               : n.acc.closed_cost();
  }

  void visit(int k, Node& node, std::vector<Stage>& prefix) {
    ++nodes_;
    if (k == scenario_.steps) {
      node.acc.finish();
      const double cost = accumulated(node);
      if (!have_ || cost < best_.cost) {
        have_ = true;
        best_.cost = cost;
        best_.stages = prefix;
      }
      return;
    }
    const auto ku = static_cast<std::size_t>(k);
    for (Stage o : {Stage::Horizontal, Stage::Vertical}) {
      Node child = node;
      const PedStep step = model_.advance(child.volume, child.prev, o, demand_.arrivals[ku],
                                          demand_.alpha[ku], demand_.gamma[ku]);
      child.prev = o;
      child.delay_units += step.delay_units();
      if (objective_ == PedObjective::Unhappiness) {
        child.acc.observe(o, step.volume, demand_.alpha[ku]);
      }
      // Remaining cost is non-negative, so the accumulated cost bounds every
      // completion from below.
      if (prune_ && have_ && accumulated(child) >= best_.cost) continue;
      prefix.push_back(o);
      visit(k + 1, child, prefix);
      prefix.pop_back();
    }
  }

  const PedScenario& scenario_;
  const PedJunctionDemand& demand_;
  PedModel model_;
  PedObjective objective_;
  ExactOptions options_;
  bool prune_;
  bool have_ = false;
  JunctionSolution best_;
  long nodes_ = 0;
};

}  // namespace

JunctionSolution enumerate_junction(const PedScenario& scenario, int j, PedObjective objective,
                                    const ExactOptions& options) {
  return scan_junction(scenario, j, objective, options,
                       [](double cost, double best) { return cost < best; });
}

JunctionSolution branch_and_bound_junction(const PedScenario& scenario, int j,
                                           PedObjective objective, const ExactOptions& options,
                                           bool prune) {
  return BranchAndBound(scenario, j, objective, options, prune).run();
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

NetworkSolution solve_exact_network(const PedScenario& scenario, PedObjective objective,
                                    const ExactOptions& options) {
  scenario.validate();
  check_horizon(scenario.steps, options);
  const int J = scenario.junction_count();
  std::vector<JunctionSolution> per(static_cast<std::size_t>(J));
  parallel_for(J, options.threads, [&](int j) {
    per[static_cast<std::size_t>(j)] = branch_and_bound_junction(scenario, j, objective, options);
  });
  NetworkSolution out;
  out.schedule = Schedule(J, scenario.steps);
  for (int j = 0; j < J; ++j) {
    const JunctionSolution& s = per[static_cast<std::size_t>(j)];
    std::copy(s.stages.begin(), s.stages.end(), out.schedule.junction(j).begin());
    out.junction_costs.push_back(s.cost);
    out.cost += s.cost;
    out.nodes += s.nodes;
  }
  return out;
}

NetworkSolution solve_joint_enumeration(const PedScenario& scenario, PedObjective objective,
                                        const ExactOptions& options) {
  scenario.validate();
  const int J = scenario.junction_count();
  const int bits = J * scenario.steps;
  if (bits > options.max_joint_bits) {
    throw SolverGuardError("joint space of " + std::to_string(bits) + " bits exceeds the " +
                           std::to_string(options.max_joint_bits) + "-bit guard");
  }
  NetworkSolution best;
  Schedule sch(J, scenario.steps);
  const std::uint64_t count = std::uint64_t{1} << bits;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    decode(mask, sch.flat());
    const double cost = network_cost(scenario, sch, objective, options.unhappiness);
    if (mask == 0 || cost < best.cost) {
      best.cost = cost;
      best.schedule = sch;
    }
  }
  for (int j = 0; j < J; ++j) {
    best.junction_costs.push_back(
        junction_cost(scenario, j, best.schedule.junction(j), objective, options.unhappiness));
  }
  best.nodes = static_cast<long>(count);
  return best;
}

double maximize_cost(const PedScenario& scenario, PedObjective objective,
                     const ExactOptions& options) {
  scenario.validate();
  std::vector<double> per(static_cast<std::size_t>(scenario.junction_count()));
  parallel_for(scenario.junction_count(), options.threads, [&](int j) {
    per[static_cast<std::size_t>(j)] =
        scan_junction(scenario, j, objective, options,
                      [](double cost, double best) { return cost > best; })
            .cost;
  });
  double total = 0.0;
  for (double c : per) total += c;
  return total;
}

}  // namespace pedsched
