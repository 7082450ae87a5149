#include "pedsched/common.hpp"

#include <charconv>
#include <limits>

namespace pedsched {

const char* to_string(Stage s) { return s == Stage::Horizontal ? "H" : "V"; }

Schedule::Schedule(int junctions, int steps, Stage fill)
    : junctions_(junctions), steps_(steps) {
  if (junctions < 0 || steps < 0) throw ValidationError("schedule shape must be non-negative");
  stages_.assign(static_cast<std::size_t>(junctions) * steps, fill);
}

Schedule Schedule::from_theta(const ThetaBits& theta) {
  Schedule s(theta.junctions, theta.steps);
  for (int j = 0; j < theta.junctions; ++j) {
    for (int k = 0; k < theta.steps; ++k) {
      const int h = theta.at(j, k, Stage::Horizontal);
      const int v = theta.at(j, k, Stage::Vertical);
      if (h + v != 1 || h > 1 || v > 1) {
        throw ValidationError("junction " + std::to_string(j) + " interval " + std::to_string(k) +
                              " must have exactly one green pedestrian stage");
      }
      s.set(j, k, h == 1 ? Stage::Horizontal : Stage::Vertical);
    }
  }
  return s;
}

ThetaBits Schedule::theta() const {
  ThetaBits t(junctions_, steps_);
  for (int j = 0; j < junctions_; ++j) {
    for (int k = 0; k < steps_; ++k) t.at(j, k, at(j, k)) = 1;
  }
  return t;
}

std::uint64_t Schedule::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t byte) {
    h ^= byte;
    h *= 1099511628211ULL;
  };
  mix(static_cast<std::uint64_t>(junctions_));
  mix(static_cast<std::uint64_t>(steps_));
  for (Stage s : stages_) mix(static_cast<std::uint64_t>(s));
  return h;
}

std::string Schedule::to_string() const {
  std::string out;
  for (int j = 0; j < junctions_; ++j) {
    for (int k = 0; k < steps_; ++k) out += pedsched::to_string(at(j, k));
    out += '\n';
  }
  return out;
}

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::int64_t Random::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw ValidationError("empty integer range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

}  // namespace pedsched
