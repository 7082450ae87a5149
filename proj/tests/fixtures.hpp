#pragma once

#include <vector>

#include "pedsched/ped_dynamics.hpp"
#include "pedsched/veh_dynamics.hpp"

namespace pedsched::testing {

inline CornerRatios hundredths(std::array<int, 4> v) {
  return {v[0] / 100.0, v[1] / 100.0, v[2] / 100.0, v[3] / 100.0};
}

/// Five-interval single-junction case rolled by hand in tests/oracles/hand_roll.py.
inline PedScenario hand_rolled_ped() {
  PedScenario s;
  s.delta = 15.0;
  s.steps = 5;
  PedJunctionDemand d;
  d.initial = {30, 12, 45, 7};
  d.arrivals = {{5, 0, 8, 3}, {2, 9, 0, 4}, {6, 1, 1, 0}, {0, 7, 3, 2}, {4, 4, 4, 4}};
  d.alpha = {hundredths({60, 25, 80, 50}), hundredths({30, 70, 45, 90}),
             hundredths({55, 10, 35, 65}), hundredths({75, 40, 20, 85}),
             hundredths({50, 50, 50, 50})};
  d.gamma = {hundredths({50, 20, 0, 100}), hundredths({33, 25, 75, 10}),
             hundredths({40, 60, 15, 5}), hundredths({0, 0, 90, 45}),
             hundredths({20, 30, 40, 50})};
  s.junctions.push_back(d);
  return s;
}

inline Schedule hand_rolled_schedule() {
  Schedule sch(1, 5);
  const Stage H = Stage::Horizontal, V = Stage::Vertical;
  const Stage seq[] = {H, H, V, V, H};
  for (int k = 0; k < 5; ++k) sch.set(0, k, seq[k]);
  return sch;
}

/// 1x1 vehicle grid: link 0 horizontal in, 1 horizontal out, 2 vertical in,
/// 3 vertical out.
inline VehScenario hand_rolled_veh() {
  VehScenario s;
  s.grid = {1, 1, 15.0, 3};
  s.initial = {40, 95, 60, 10};
  s.inflow = {{20, 20, 20}, {}, {5, 50, 5}, {}};
  return s;
}

}  // namespace pedsched::testing

namespace pedsched::testing {

/// Random pedestrian scenario with ratios on a 0.01 grid.
inline PedScenario random_ped(std::uint64_t seed, int junctions, int steps, Count max_initial = 60,
                              Count max_arrivals = 20) {
  Random rng(seed);
  PedScenario s;
  s.steps = steps;
  for (int j = 0; j < junctions; ++j) {
    PedJunctionDemand d;
    for (Count& c : d.initial) c = rng.uniform_int(0, max_initial);
    for (int k = 0; k < steps; ++k) {
      CornerCounts a{};
      CornerRatios al{}, ga{};
      for (int i = 0; i < kCornerCount; ++i) {
        a[static_cast<std::size_t>(i)] = rng.uniform_int(0, max_arrivals);
        al[static_cast<std::size_t>(i)] = static_cast<double>(rng.uniform_int(0, 100)) / 100.0;
        ga[static_cast<std::size_t>(i)] = static_cast<double>(rng.uniform_int(0, 100)) / 100.0;
      }
      d.arrivals.push_back(a);
      d.alpha.push_back(al);
      d.gamma.push_back(ga);
    }
    s.junctions.push_back(d);
  }
  return s;
}

inline Schedule schedule_from_mask(unsigned mask, int steps) {
  Schedule s(1, steps);
  for (int k = 0; k < steps; ++k) {
    s.set(0, k, (mask >> k) & 1U ? Stage::Vertical : Stage::Horizontal);
  }
  return s;
}

}  // namespace pedsched::testing
