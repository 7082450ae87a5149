#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "pedsched/ped_dynamics.hpp"

namespace pedsched {

struct UnhappinessOptions {
  /// exp(phi * delta) when true; exp(phi) (intervals) when false.
  bool exponent_in_seconds = true;
  /// Exponents above this raise SaturationError instead of overflowing.
  double max_exponent = 700.0;
};

/// Red-run bookkeeping for one stage over a horizon of N intervals.
///
/// Auxiliary sequences are kept for audit: h and q are indexed 0..N, f
/// and phi are indexed by interval 1..N at positions 0..N-1.  phi(k) is the
/// length of the red run that ends at interval k, and zero everywhere else.
struct RedRunProfile {
  std::vector<int> h;
  std::vector<int> f;
  std::vector<int> q;
  std::vector<int> phi;
};

/// `theta` holds theta_o(1..N) for one stage.
RedRunProfile red_run_profile(std::span<const std::uint8_t> theta);

/// P-bar_{i,o}(k): blocked demand P_i * eta_i averaged over the red run that
/// ends at k; zero where phi is zero.  `eta` holds the stage's ratio per
/// interval and corner.
std::vector<std::array<double, kCornerCount>> averaged_blocked(
    std::span<const CornerCounts> volume, std::span<const CornerRatios> eta,
    std::span<const std::uint8_t> theta, std::span<const int> phi);

/// averaged * exp(run * delta), guarded by options.max_exponent.
double unhappiness_term(double averaged, int run, double delta, const UnhappinessOptions& opts);

/// Unhappiness of one junction; summed interval-major, then stage, then corner.
double junction_unhappiness(const PedJunctionDemand& demand, const JunctionTrace& trace,
                            std::span<const Stage> stages, double delta,
                            const UnhappinessOptions& opts = {});

double unhappiness_cost(const PedScenario& scenario, const PedTrace& trace,
                        const Schedule& schedule, const UnhappinessOptions& opts = {});

/// Incremental form of junction_unhappiness for prefix searches.  Feeding
/// the intervals of a schedule in order and calling finish() yields exactly
/// the same double as junction_unhappiness.
class UnhappinessAccumulator {
 public:
  UnhappinessAccumulator(double delta, UnhappinessOptions opts) : delta_(delta), opts_(opts) {}

  /// Records interval k, whose green stage is `stage` and whose corner
  /// volumes are `volume`; closes the run of `stage` that ended at k-1.
  void observe(Stage stage, const CornerCounts& volume, const CornerRatios& alpha);
  /// Closes the red run still open at the horizon end.
  void finish();

  /// Terms of every closed run so far.  Never decreases.
  double closed_cost() const { return cost_; }

 private:
  void close(Stage o);

  double delta_;
  UnhappinessOptions opts_;
  double cost_ = 0.0;
  std::array<int, kStageCount> run_{};
  std::array<std::array<double, kCornerCount>, kStageCount> blocked_{};
};

/// Pedestrian trace CSV with the unhappiness columns appended:
/// ...,step_delay,phi,p_bar,unhappiness_term
void write_trace_csv(std::ostream& out, const PedScenario& scenario, const PedTrace& trace,
                     const Schedule& schedule, const UnhappinessOptions& opts);

}  // namespace pedsched
