#include "pedsched/unhappiness.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace pedsched {

RedRunProfile red_run_profile(std::span<const std::uint8_t> theta) {
  const int n = static_cast<int>(theta.size());
  auto th = [&](int k) { return static_cast<int>(theta[static_cast<std::size_t>(k - 1)]); };

  RedRunProfile p;
  p.h.assign(static_cast<std::size_t>(n) + 1, 0);
  p.q.assign(static_cast<std::size_t>(n) + 1, 0);
  p.f.assign(static_cast<std::size_t>(n), 0);
  p.phi.assign(static_cast<std::size_t>(n), 0);
  if (n == 0) return p;

  // Switch markers: h(k) = k wherever the light changes after k.
  for (int k = 1; k <= n - 1; ++k) p.h[static_cast<std::size_t>(k)] = k * (th(k) ^ th(k + 1));
  p.h[static_cast<std::size_t>(n)] = n;

  // f flags the last interval of every red run (red -> green, or red at the end).
  for (int k = 1; k <= n - 1; ++k) {
    p.f[static_cast<std::size_t>(k - 1)] = std::max(th(k + 1) - th(k), 0);
  }
  p.f[static_cast<std::size_t>(n - 1)] = th(n) == 0 ? 1 : 0;

  int q_sum = 0;
  for (int k = 1; k <= n; ++k) {
    const int hk = p.h[static_cast<std::size_t>(k)];
    const int hprev = p.h[static_cast<std::size_t>(k - 1)];
    const int q = hprev != 0 ? std::max(hk - hprev, 0) : std::max(hk - hprev - q_sum, 0);
    p.q[static_cast<std::size_t>(k)] = q;
    q_sum += q;
  }

  int run = 0;
  for (int k = 1; k <= n; ++k) {
    run = th(k) == 0 ? run + 1 : 0;
    p.phi[static_cast<std::size_t>(k - 1)] = p.f[static_cast<std::size_t>(k - 1)] * run;
  }
  return p;
}

std::vector<std::array<double, kCornerCount>> averaged_blocked(
    std::span<const CornerCounts> volume, std::span<const CornerRatios> eta,
    std::span<const std::uint8_t> theta, std::span<const int> phi) {
  const std::size_t n = theta.size();
  std::vector<std::array<double, kCornerCount>> out(n, std::array<double, kCornerCount>{});
  std::array<double, kCornerCount> run_sum{};
  for (std::size_t k = 0; k < n; ++k) {
    if (theta[k] == 0) {
      for (int i = 0; i < kCornerCount; ++i) {
        run_sum[i] += static_cast<double>(volume[k][i]) * eta[k][i];
      }
    }
    if (phi[k] != 0) {
      for (int i = 0; i < kCornerCount; ++i) out[k][i] = run_sum[i] / phi[k];
      run_sum = {};
    }
  }
  return out;
}

double unhappiness_term(double averaged, int run, double delta, const UnhappinessOptions& opts) {
  const double exponent = opts.exponent_in_seconds ? run * delta : static_cast<double>(run);
  if (exponent > opts.max_exponent) {
    throw SaturationError("unhappiness exponent " + std::to_string(exponent) +
                          " exceeds bound " + std::to_string(opts.max_exponent));
  }
  return averaged * std::exp(exponent);
}

namespace {

struct StageProfile {
  std::vector<std::uint8_t> theta;
  RedRunProfile runs;
  std::vector<std::array<double, kCornerCount>> p_bar;
};

std::array<StageProfile, kStageCount> stage_profiles(const PedJunctionDemand& demand,
                                                     const JunctionTrace& trace,
                                                     std::span<const Stage> stages) {
  const std::size_t n = stages.size();
  std::vector<CornerCounts> volume(n);
  for (std::size_t k = 0; k < n; ++k) volume[k] = trace.steps[k].volume;

  std::array<StageProfile, kStageCount> out;
  for (Stage o : {Stage::Horizontal, Stage::Vertical}) {
    StageProfile& sp = out[static_cast<std::size_t>(index(o))];
    sp.theta.resize(n);
    std::vector<CornerRatios> eta(n);
    for (std::size_t k = 0; k < n; ++k) {
      sp.theta[k] = stages[k] == o ? 1 : 0;
      for (int i = 0; i < kCornerCount; ++i) eta[k][i] = demand.ratio(static_cast<int>(k), i, o);
    }
    sp.runs = red_run_profile(sp.theta);
    sp.p_bar = averaged_blocked(volume, eta, sp.theta, sp.runs.phi);
  }
  return out;
}

}  // namespace

double junction_unhappiness(const PedJunctionDemand& demand, const JunctionTrace& trace,
                            std::span<const Stage> stages, double delta,
                            const UnhappinessOptions& opts) {
  const auto profiles = stage_profiles(demand, trace, stages);
  double cost = 0.0;
  for (std::size_t k = 0; k < stages.size(); ++k) {
    for (const StageProfile& sp : profiles) {
      const int phi = sp.runs.phi[k];
      if (phi == 0) continue;
      for (int i = 0; i < kCornerCount; ++i) {
        cost += unhappiness_term(sp.p_bar[k][i], phi, delta, opts);
      }
    }
  }
  return cost;
}

double unhappiness_cost(const PedScenario& scenario, const PedTrace& trace,
                        const Schedule& schedule, const UnhappinessOptions& opts) {
  double total = 0.0;
  for (int j = 0; j < schedule.junctions(); ++j) {
    total += junction_unhappiness(scenario.junctions[static_cast<std::size_t>(j)],
                                  trace.junctions[static_cast<std::size_t>(j)],
                                  schedule.junction(j), scenario.delta, opts);
  }
  return total;
}

void UnhappinessAccumulator::observe(Stage stage, const CornerCounts& volume,
                                     const CornerRatios& alpha) {
  close(stage);
  const Stage red = other(stage);
  auto& blocked = blocked_[static_cast<std::size_t>(index(red))];
  for (int i = 0; i < kCornerCount; ++i) {
    const double eta = red == Stage::Horizontal ? alpha[i] : 1.0 - alpha[i];
    blocked[i] += static_cast<double>(volume[i]) * eta;
  }
  ++run_[static_cast<std::size_t>(index(red))];
}

void UnhappinessAccumulator::finish() {
  for (Stage o : {Stage::Horizontal, Stage::Vertical}) close(o);
}

void UnhappinessAccumulator::close(Stage o) {
  const auto s = static_cast<std::size_t>(index(o));
  const int run = run_[s];
  if (run == 0) return;
  for (int i = 0; i < kCornerCount; ++i) {
    cost_ += unhappiness_term(blocked_[s][i] / run, run, delta_, opts_);
  }
  run_[s] = 0;
  blocked_[s] = {};
}

void write_trace_csv(std::ostream& out, const PedScenario& scenario, const PedTrace& trace,
                     const Schedule& schedule, const UnhappinessOptions& opts) {
  out << "junction,interval,corner,volume,stage,capacity,flow_count,step_delay,phi,p_bar,"
         "unhappiness_term\n";
  for (int j = 0; j < schedule.junctions(); ++j) {
    const JunctionTrace& jt = trace.junctions[static_cast<std::size_t>(j)];
    const auto profiles =
        stage_profiles(scenario.junctions[static_cast<std::size_t>(j)], jt, schedule.junction(j));
    for (std::size_t k = 0; k < jt.steps.size(); ++k) {
      const PedStep& s = jt.steps[k];
      const Stage stage = schedule.at(j, static_cast<int>(k));
      // Only the stage red in interval k can close a run there.
      const StageProfile& red = profiles[static_cast<std::size_t>(index(other(stage)))];
      const int phi = red.runs.phi[k];
      for (int i = 0; i < kCornerCount; ++i) {
        const double p_bar = red.p_bar[k][i];
        const double term = phi != 0 ? unhappiness_term(p_bar, phi, trace.delta, opts) : 0.0;
        out << j << ',' << k + 1 << ',' << i + 1 << ',' << s.volume[i] << ',' << to_string(stage)
            << ',' << s.capacity[index(stage)] << ',' << s.outflow[i] << ','
            << format_number(static_cast<double>(s.volume[i] - s.outflow[i]) * trace.delta) << ','
            << phi << ',' << format_number(p_bar) << ',' << format_number(term) << '\n';
      }
    }
  }
}

}  // namespace pedsched
