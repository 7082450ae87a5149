#include "pedsched/topology.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace pedsched {

void GridSpec::validate() const {
  if (n_h < 1 || n_v < 1) {
    throw ValidationError("grid must have at least one junction per row and column, got " +
                          std::to_string(n_v) + "x" + std::to_string(n_h));
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ValidationError("sampling interval must be positive");
  }
  if (steps < 1) {
    throw ValidationError("prediction steps must be at least 1");
  }
}

const JunctionTopology& JunctionTopology::standard() {
  static const JunctionTopology topo = [] {
    JunctionTopology t{};
    for (Stage o : {Stage::Horizontal, Stage::Vertical}) {
      for (Corner i = 0; i < kCornerCount; ++i) {
        t.streams[index(o)][i] = Stream{i, partner(i, o), o};
      }
    }
    return t;
  }();
  return topo;
}

GridNetwork::GridNetwork(const GridSpec& spec) : spec_(spec) {
  spec_.validate();
  const int rows = spec_.n_v;
  const int cols = spec_.n_h;
  links_.resize(static_cast<std::size_t>(rows * (cols + 1) + (rows + 1) * cols));

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c <= cols; ++c) {
      Link& l = links_[static_cast<std::size_t>(horizontal_link(r, c))];
      l.id = horizontal_link(r, c);
      l.direction = Stage::Horizontal;
      l.row = r;
      l.col = c;
      l.upstream_junction = c > 0 ? junction_id(r, c - 1) : -1;
      l.downstream_junction = c < cols ? junction_id(r, c) : -1;
      l.successor = c < cols ? horizontal_link(r, c + 1) : -1;
    }
  }
  for (int r = 0; r <= rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      Link& l = links_[static_cast<std::size_t>(vertical_link(r, c))];
      l.id = vertical_link(r, c);
      l.direction = Stage::Vertical;
      l.row = r;
      l.col = c;
      l.upstream_junction = r > 0 ? junction_id(r - 1, c) : -1;
      l.downstream_junction = r < rows ? junction_id(r, c) : -1;
      l.successor = r < rows ? vertical_link(r + 1, c) : -1;
    }
  }
}

int GridNetwork::incoming_link(int j, Stage direction) const {
  const int r = row_of(j);
  const int c = col_of(j);
  return direction == Stage::Horizontal ? horizontal_link(r, c) : vertical_link(r, c);
}

int GridNetwork::outgoing_link(int j, Stage direction) const {
  const int r = row_of(j);
  const int c = col_of(j);
  return direction == Stage::Horizontal ? horizontal_link(r, c + 1) : vertical_link(r + 1, c);
}

std::vector<int> GridNetwork::boundary_links() const {
  std::vector<int> out;
  for (const Link& l : links_) {
    if (l.boundary()) out.push_back(l.id);
  }
  return out;
}

std::vector<int> GridNetwork::exit_links() const {
  std::vector<int> out;
  for (const Link& l : links_) {
    if (l.exit()) out.push_back(l.id);
  }
  return out;
}

std::vector<int> GridNetwork::topological_order() const {
  std::vector<int> indegree(links_.size(), 0);
  for (const Link& l : links_) {
    if (l.successor >= 0) ++indegree[static_cast<std::size_t>(l.successor)];
  }
  std::deque<int> ready;
  for (const Link& l : links_) {
    if (indegree[static_cast<std::size_t>(l.id)] == 0) ready.push_back(l.id);
  }
  std::vector<int> order;
  order.reserve(links_.size());
  while (!ready.empty()) {
    const int id = ready.front();
    ready.pop_front();
    order.push_back(id);
    const int next = link(id).successor;
    if (next >= 0 && --indegree[static_cast<std::size_t>(next)] == 0) ready.push_back(next);
  }
  if (order.size() != links_.size()) {
    throw ModelError("vehicle link graph has a cycle");
  }
  return order;
}

std::vector<int> GridNetwork::resolution_order() const {
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(junction_count()));
  for (int r = spec_.n_v - 1; r >= 0; --r) {
    for (int c = spec_.n_h - 1; c >= 0; --c) order.push_back(junction_id(r, c));
  }
  return order;
}

GridNetwork build_grid(const GridSpec& spec) { return GridNetwork(spec); }

std::array<StageCoupling::JointMode, kStageCount> StageCoupling::joint_modes() const {
  return {JointMode{Stage::Horizontal, veh_for_ped[0]},
          JointMode{Stage::Vertical, veh_for_ped[1]}};
}

void StageCoupling::validate() const {
  if (veh_for_ped[0] == veh_for_ped[1]) {
    throw ValidationError("stage coupling must pair each pedestrian stage with a distinct vehicle stage");
  }
}

const char* to_string(CouplingMode m) {
  return m == CouplingMode::Exclusive ? "exclusive" : "relaxed";
}

}  // namespace pedsched
