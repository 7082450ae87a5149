#include <gtest/gtest.h>

#include <algorithm>

#include "pedsched/topology.hpp"

using namespace pedsched;

TEST(Corners, PartnersAreInvolutions) {
  for (Corner i = 0; i < kCornerCount; ++i) {
    EXPECT_EQ(horizontal_partner(horizontal_partner(i)), i);
    EXPECT_EQ(vertical_partner(vertical_partner(i)), i);
    EXPECT_NE(horizontal_partner(i), vertical_partner(i));
    EXPECT_NE(horizontal_partner(i), i);
  }
  // 1<->2, 3<->4 horizontally; 1<->4, 2<->3 vertically.
  EXPECT_EQ(horizontal_partner(0), 1);
  EXPECT_EQ(horizontal_partner(2), 3);
  EXPECT_EQ(vertical_partner(0), 3);
  EXPECT_EQ(vertical_partner(1), 2);
}

TEST(Corners, EachStageEnablesFourStreams) {
  const auto& topo = JunctionTopology::standard();
  for (Stage o : {Stage::Horizontal, Stage::Vertical}) {
    std::array<int, kCornerCount> into{};
    for (const Stream& s : topo.enabled_by(o)) {
      EXPECT_EQ(s.stage, o);
      EXPECT_EQ(s.to, partner(s.from, o));
      ++into[static_cast<std::size_t>(s.to)];
    }
    for (int c : into) EXPECT_EQ(c, 1);
  }
  EXPECT_EQ(stream_id(Stage::Vertical, 3), 7);
}

TEST(Grid, LinkCountsAndEnds) {
  const GridNetwork net = build_grid({3, 2, 15.0, 4});
  // Horizontal: n_v rows of n_h+1 links; vertical: n_v+1 rows of n_h links.
  EXPECT_EQ(net.link_count(), 2 * 4 + 3 * 3);
  EXPECT_EQ(net.boundary_links().size(), 5u);
  EXPECT_EQ(net.exit_links().size(), 5u);
  for (int j = 0; j < net.junction_count(); ++j) {
    for (Stage d : {Stage::Horizontal, Stage::Vertical}) {
      const Link& in = net.link(net.incoming_link(j, d));
      const Link& out = net.link(net.outgoing_link(j, d));
      EXPECT_EQ(in.downstream_junction, j);
      EXPECT_EQ(out.upstream_junction, j);
      EXPECT_EQ(in.successor, out.id);
      EXPECT_EQ(in.direction, d);
    }
  }
}

TEST(Grid, TopologicalOrderRespectsSuccessors) {
  const GridNetwork net = build_grid({3, 3, 15.0, 2});
  const auto order = net.topological_order();
  ASSERT_EQ(order.size(), static_cast<std::size_t>(net.link_count()));
  std::vector<int> pos(order.size());
  for (std::size_t p = 0; p < order.size(); ++p) pos[static_cast<std::size_t>(order[p])] = static_cast<int>(p);
  for (const Link& l : net.links()) {
    if (l.successor >= 0) EXPECT_LT(pos[static_cast<std::size_t>(l.id)], pos[static_cast<std::size_t>(l.successor)]);
  }
}

TEST(Grid, ResolutionOrderVisitsDownstreamFirst) {
  const GridNetwork net = build_grid({2, 3, 15.0, 2});
  const auto order = net.resolution_order();
  ASSERT_EQ(order.size(), 6u);
  std::vector<int> pos(order.size());
  for (std::size_t p = 0; p < order.size(); ++p) pos[static_cast<std::size_t>(order[p])] = static_cast<int>(p);
  for (int j = 0; j < net.junction_count(); ++j) {
    for (Stage d : {Stage::Horizontal, Stage::Vertical}) {
      const int down = net.link(net.outgoing_link(j, d)).downstream_junction;
      if (down >= 0) EXPECT_LT(pos[static_cast<std::size_t>(down)], pos[static_cast<std::size_t>(j)]);
    }
  }
}

TEST(Grid, RejectsEmptyDimensions) {
  EXPECT_THROW(build_grid({0, 2, 15.0, 2}), ValidationError);
  EXPECT_THROW(build_grid({2, 2, 15.0, 0}), ValidationError);
  EXPECT_THROW(build_grid({2, 2, -1.0, 3}), ValidationError);
}

TEST(Coupling, JointModesGreenOneStagePerLayer) {
  for (const StageCoupling& c : {StageCoupling::parallel(), StageCoupling::crossed()}) {
    const auto modes = c.joint_modes();
    EXPECT_NE(modes[0].ped, modes[1].ped);
    EXPECT_NE(modes[0].veh, modes[1].veh);
  }
  StageCoupling bad;
  bad.veh_for_ped = {Stage::Horizontal, Stage::Horizontal};
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(ScheduleType, ThetaRoundTripAndRejection) {
  Schedule s(2, 3);
  s.set(1, 2, Stage::Vertical);
  ThetaBits t = s.theta();
  EXPECT_EQ(Schedule::from_theta(t), s);
  t.at(0, 0, Stage::Vertical) = 1;  // two greens
  EXPECT_THROW(Schedule::from_theta(t), ValidationError);
  t.at(0, 0, Stage::Vertical) = 0;
  t.at(0, 0, Stage::Horizontal) = 0;  // no green
  EXPECT_THROW(Schedule::from_theta(t), ValidationError);
  EXPECT_NE(Schedule(2, 3).hash(), s.hash());
}
