#pragma once

#include <array>
#include <vector>

#include "pedsched/common.hpp"

namespace pedsched {

/// Grid dimensions and time discretisation.  n_h junctions per row (columns),
/// n_v junctions per column (rows).
struct GridSpec {
  int n_h = 1;
  int n_v = 1;
  double delta = 15.0;  // seconds
  int steps = 1;        // prediction steps N

  int junctions() const { return n_h * n_v; }
  double horizon_seconds() const { return steps * delta; }
  void validate() const;
};

// Waiting zones are numbered 1..4 anticlockwise; internally 0..3.
using Corner = int;
inline constexpr int kCornerCount = 4;
inline constexpr int kStreamCount = kCornerCount * kStageCount;

constexpr Corner horizontal_partner(Corner i) { return i % 2 == 0 ? i + 1 : i - 1; }

constexpr Corner vertical_partner(Corner i) {
  const Corner jh = horizontal_partner(i);
  return i < 2 ? jh + 2 : jh - 2;
}

constexpr Corner partner(Corner i, Stage o) {
  return o == Stage::Horizontal ? horizontal_partner(i) : vertical_partner(i);
}

/// Ordered crosswalk pair (from, to) enabled by one pedestrian stage.
struct Stream {
  Corner from;
  Corner to;
  Stage stage;

  friend bool operator==(const Stream&, const Stream&) = default;
};

/// Streams are numbered stage-major: id = stage * 4 + from-corner.
constexpr int stream_id(Stage o, Corner from) { return index(o) * kCornerCount + from; }

/// Corner/crosswalk layout shared by every junction.
struct JunctionTopology {
  std::array<std::array<Stream, kCornerCount>, kStageCount> streams;

  const std::array<Stream, kCornerCount>& enabled_by(Stage o) const {
    return streams[index(o)];
  }
  static const JunctionTopology& standard();
};

/// A one-way road segment.  Horizontal links run left to right and vertical
/// links top to bottom.  A link with no downstream junction is a network exit;
/// one with no upstream junction is fed from outside.
struct Link {
  int id = -1;
  Stage direction = Stage::Horizontal;
  int row = 0;
  int col = 0;
  int upstream_junction = -1;
  int downstream_junction = -1;
  int successor = -1;

  bool boundary() const { return upstream_junction < 0; }
  bool exit() const { return downstream_junction < 0; }
};

/// Both layers of a rectangular grid.  Junction (r, c) receives one horizontal
/// and one vertical link and emits one of each; outgoing links of (r, c) feed
/// (r, c+1) and (r+1, c).  Immutable after construction.
class GridNetwork {
 public:
  explicit GridNetwork(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }
  int junction_count() const { return spec_.junctions(); }
  int junction_id(int row, int col) const { return row * spec_.n_h + col; }
  int row_of(int j) const { return j / spec_.n_h; }
  int col_of(int j) const { return j % spec_.n_h; }

  const std::vector<Link>& links() const { return links_; }
  const Link& link(int id) const { return links_[static_cast<std::size_t>(id)]; }
  int link_count() const { return static_cast<int>(links_.size()); }

  int incoming_link(int j, Stage direction) const;
  int outgoing_link(int j, Stage direction) const;

  std::vector<int> boundary_links() const;
  std::vector<int> exit_links() const;

  /// Kahn order over the link graph (link -> successor).  Throws ModelError
  /// if the graph has a cycle.
  std::vector<int> topological_order() const;

  /// Junctions ordered so every downstream junction precedes its upstream
  /// neighbours; flows resolved in this order see their downstream outflow.
  std::vector<int> resolution_order() const;

  const JunctionTopology& junction_topology() const { return JunctionTopology::standard(); }

 private:
  int horizontal_link(int row, int col) const { return row * (spec_.n_h + 1) + col; }
  int vertical_link(int row, int col) const {
    return spec_.n_v * (spec_.n_h + 1) + row * spec_.n_h + col;
  }

  GridSpec spec_;
  std::vector<Link> links_;
};

GridNetwork build_grid(const GridSpec& spec);

enum class CouplingMode { Exclusive, Relaxed };

/// Pairing of pedestrian and vehicle stages into joint junction modes.  Each
/// joint mode greens exactly one stage of each layer.
struct StageCoupling {
  struct JointMode {
    Stage ped;
    Stage veh;
  };

  /// veh_for_ped[o] is the vehicle stage green alongside pedestrian stage o.
  std::array<Stage, kStageCount> veh_for_ped{Stage::Horizontal, Stage::Vertical};
  CouplingMode mode = CouplingMode::Exclusive;

  /// Crosswalks run parallel to the traffic they share a green with.
  static StageCoupling parallel() { return {}; }
  static StageCoupling crossed() {
    return {{Stage::Vertical, Stage::Horizontal}, CouplingMode::Exclusive};
  }

  std::array<JointMode, kStageCount> joint_modes() const;
  Stage vehicle_stage(Stage ped) const { return veh_for_ped[index(ped)]; }
  void validate() const;
};

const char* to_string(CouplingMode m);

}  // namespace pedsched
