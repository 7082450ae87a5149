#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pedsched {

using Count = std::int64_t;

/// Thrown for malformed input: bad geometry, inconsistent scenario, bad flags.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The crossing geometry leaves no time to cross within one interval.
class GeometryError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A search was asked to do more than its configured guard allows.
class SolverGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The unhappiness exponent exceeded its configured bound.
class SaturationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A dynamics invariant broke (negative volume, link over capacity).
class ModelError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Signal stage of one layer at a junction.  Horizontal sorts first, which is
/// the tie-break order used by every search in the library.
enum class Stage : std::uint8_t { Horizontal = 0, Vertical = 1 };

inline constexpr int kStageCount = 2;

constexpr int index(Stage s) { return static_cast<int>(s); }
constexpr Stage other(Stage s) {
  return s == Stage::Horizontal ? Stage::Vertical : Stage::Horizontal;
}
const char* to_string(Stage s);

/// Floor of a non-negative product of a count and a ratio.  Ratios are
/// carried as doubles, so 0.29 * 100 lands a hair below 29; the nudge keeps
/// the floor exact for ratios given to a few decimal places.
inline Count floor_count(double x) {
  return static_cast<Count>(std::floor(x + 1e-9));
}

/// Shortest decimal text that parses back to the same double.
std::string format_number(double x);

/// Raw per-stage light bits theta_o(k), indexed [junction][interval][stage].
/// May violate the one-stage-per-interval rule; Schedule may not.
struct ThetaBits {
  int junctions = 0;
  int steps = 0;
  std::vector<std::uint8_t> bits;

  ThetaBits() = default;
  ThetaBits(int junctions_, int steps_)
      : junctions(junctions_), steps(steps_),
        bits(static_cast<std::size_t>(junctions_) * steps_ * kStageCount, 0) {}

  std::uint8_t& at(int j, int k, Stage o) {
    return bits[(static_cast<std::size_t>(j) * steps + k) * kStageCount + index(o)];
  }
  std::uint8_t at(int j, int k, Stage o) const {
    return bits[(static_cast<std::size_t>(j) * steps + k) * kStageCount + index(o)];
  }
};

/// One green stage per junction per interval.  Because each entry names the
/// single green stage, every Schedule satisfies sum_o theta_o(k) = 1.
class Schedule {
 public:
  Schedule() = default;
  Schedule(int junctions, int steps, Stage fill = Stage::Horizontal);

  /// Rejects bit patterns where a junction has zero or two green stages.
  static Schedule from_theta(const ThetaBits& theta);

  int junctions() const { return junctions_; }
  int steps() const { return steps_; }

  Stage at(int j, int k) const { return stages_[offset(j, k)]; }
  void set(int j, int k, Stage s) { stages_[offset(j, k)] = s; }

  std::span<const Stage> junction(int j) const {
    return {stages_.data() + offset(j, 0), static_cast<std::size_t>(steps_)};
  }
  std::span<Stage> junction(int j) {
    return {stages_.data() + offset(j, 0), static_cast<std::size_t>(steps_)};
  }
  std::span<const Stage> flat() const { return stages_; }
  std::span<Stage> flat() { return stages_; }

  ThetaBits theta() const;

  /// FNV-1a over the stage bytes; stable across runs and platforms.
  std::uint64_t hash() const;

  /// Rows are junctions, columns intervals, 'H'/'V' per cell.
  std::string to_string() const;

  friend bool operator==(const Schedule&, const Schedule&) = default;
  friend auto operator<=>(const Schedule& a, const Schedule& b) {
    return a.stages_ <=> b.stages_;
  }

 private:
  std::size_t offset(int j, int k) const {
    return static_cast<std::size_t>(j) * steps_ + k;
  }

  int junctions_ = 0;
  int steps_ = 0;
  std::vector<Stage> stages_;
};

/// Seeded random source with platform-independent draws (the standard
/// distributions are implementation-defined).
class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  bool bit() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pedsched
