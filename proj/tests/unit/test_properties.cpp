#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pedsched/ped_dynamics.hpp"
#include "pedsched/veh_dynamics.hpp"

using namespace pedsched;

namespace {

constexpr int kSteps = 1000;

Count uniform_count(std::mt19937_64& rng, Count lo, Count hi) {
  return std::uniform_int_distribution<Count>(lo, hi)(rng);
}

double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Stage coin(std::mt19937_64& rng) { return rng() & 1U ? Stage::Vertical : Stage::Horizontal; }

}  // namespace

TEST(Invariants, PedestrianStepsRandomized) {
  std::mt19937_64 rng(20240611);
  const double deltas[] = {15.0, 20.0, 30.0};
  int checked = 0;
  while (checked < kSteps) {
    const double delta = deltas[rng() % 3];
    const PedModel model(CrosswalkGeometry{}, delta);
    CornerCounts volume{};
    for (Count& v : volume) v = uniform_count(rng, 0, 200);
    std::optional<Stage> prev;
    if (rng() % 3) prev = coin(rng);
    for (int run = 0; run < 25 && checked < kSteps; ++run, ++checked) {
      const Stage o = coin(rng);
      CornerCounts arrivals{};
      CornerRatios alpha{}, gamma{};
      for (int i = 0; i < kCornerCount; ++i) {
        arrivals[i] = uniform_count(rng, 0, 40);
        alpha[i] = uniform_real(rng, 0.0, 1.0);
        gamma[i] = uniform_real(rng, 0.0, 0.6);
      }
      const CornerCounts before = volume;
      const Count cap = model.capacity_for(prev, o);
      const PedStep s = model.advance(volume, prev, o, arrivals, alpha, gamma);

      CornerCounts out{}, in{};
      for (Corner i = 0; i < kCornerCount; ++i) {
        for (Stage st : {Stage::Horizontal, Stage::Vertical}) {
          const Count f = s.flow[stream_id(st, i)];
          ASSERT_GE(f, 0);
          if (st != o) {
            ASSERT_EQ(f, 0) << "red stream " << stream_id(st, i);
            continue;
          }
          const double eta = st == Stage::Horizontal ? alpha[i] : 1.0 - alpha[i];
          ASSERT_LE(f, cap);
          ASSERT_LE(f, static_cast<Count>(std::floor(before[i] * eta + 1e-9)));
          out[i] += f;
          in[partner(i, st)] += f;
        }
      }
      for (Corner i = 0; i < kCornerCount; ++i) {
        ASSERT_EQ(s.volume[i], before[i]);
        ASSERT_EQ(s.outflow[i], out[i]);
        ASSERT_EQ(s.inflow[i], in[i]);
        ASSERT_LE(s.outflow[i], before[i]);
        ASSERT_GE(s.departures[i], 0);
        ASSERT_LE(s.departures[i], in[i]);
        ASSERT_EQ(volume[i], before[i] + arrivals[i] + in[i] - out[i] - s.departures[i]);
        ASSERT_GE(volume[i], 0);
      }
      prev = o;
    }
  }
  EXPECT_EQ(checked, kSteps);
}

TEST(Invariants, VehicleStepsRandomized) {
  std::mt19937_64 rng(77031);
  int checked = 0;
  while (checked < kSteps) {
    GridSpec g;
    g.n_v = 1 + static_cast<int>(rng() % 3);
    g.n_h = 1 + static_cast<int>(rng() % 3);
    const GridNetwork net(g);
    VehScenario sc;
    sc.grid = g;
    sc.params.max_volume = uniform_count(rng, 20, 120);
    sc.params.saturation = uniform_real(rng, 20.0, 150.0);
    const double l0 = uniform_real(rng, 0.2, 0.6);
    sc.params.levels = {l0, l0 * uniform_real(rng, 0.3, 1.0)};
    const int run = 20;
    sc.initial.resize(static_cast<std::size_t>(net.link_count()));
    sc.inflow.resize(static_cast<std::size_t>(net.link_count()));
    for (const Link& l : net.links()) {
      sc.initial[static_cast<std::size_t>(l.id)] = uniform_count(rng, 0, sc.params.max_volume);
      if (!l.boundary()) continue;
      auto& series = sc.inflow[static_cast<std::size_t>(l.id)];
      for (int k = 0; k < run; ++k) series.push_back(uniform_count(rng, 0, 60));
    }
    sc.validate(net);
    const VehModel model(net, sc);
    VehState state = VehState::initial(net, sc);
    std::vector<Stage> stages(static_cast<std::size_t>(net.junction_count()));

    for (int k = 0; k < run && checked < kSteps; ++k, ++checked) {
      for (Stage& s : stages) s = coin(rng);
      const std::vector<Count> before = state.volume;
      const VehStep st = model.advance(state, stages, k);

      Count total_before = 0, total_after = 0, admitted = 0, exited = 0;
      std::vector<Count> expect = before;
      for (const Link& l : net.links()) {
        const auto li = static_cast<std::size_t>(l.id);
        const Count f = st.outflow[li];
        ASSERT_GE(f, 0);
        ASSERT_LE(f, before[li]);
        ASSERT_LE(f, static_cast<Count>(std::floor(st.level[li] * sc.params.saturation + 1e-9)));
        if (!l.exit()) {
          const bool green = stages[static_cast<std::size_t>(l.downstream_junction)] == l.direction;
          if (!green) {
            ASSERT_EQ(f, 0) << "red link " << l.id;
            ASSERT_EQ(st.level_index[li], -1);
          }
        } else {
          exited += f;
        }
        if (l.boundary()) {
          const Count arriving = sc.inflow[li][static_cast<std::size_t>(k)];
          ASSERT_GE(st.accepted[li], 0);
          ASSERT_GE(st.dropped[li], 0);
          ASSERT_EQ(st.accepted[li] + st.dropped[li], arriving);
          admitted += st.accepted[li];
        } else {
          ASSERT_EQ(st.accepted[li], 0);
        }
        expect[li] += st.accepted[li] - f;
        if (l.successor >= 0) expect[static_cast<std::size_t>(l.successor)] += f;
        total_before += before[li];
      }
      for (const Link& l : net.links()) {
        const auto li = static_cast<std::size_t>(l.id);
        ASSERT_EQ(state.volume[li], expect[li]);
        ASSERT_GE(state.volume[li], 0);
        ASSERT_LE(state.volume[li], sc.params.max_volume);
        total_after += state.volume[li];
      }
      ASSERT_EQ(total_after, total_before + admitted - exited);
    }
  }
  EXPECT_EQ(checked, kSteps);
}
