#pragma once

#include <filesystem>
#include <iosfwd>

#include "pedsched/milp_model.hpp"

namespace pedsched {

/// CPLEX-style LP text.  Output is a pure function of the model: variables
/// and rows keep declaration order and numbers use the shortest round-trip
/// decimal form.  Every variable is listed under Bounds, which fixes the
/// variable order on reading.
void write_lp(std::ostream& out, const MilpModel& model);

/// Throws std::runtime_error naming the path on I/O failure.
void export_lp(const MilpModel& model, const std::filesystem::path& path);

/// Reads the subset of the format produced by write_lp (plus free-form
/// whitespace and line wrapping).  Throws ValidationError on malformed text.
MilpModel read_lp(std::istream& in);
MilpModel import_lp(const std::filesystem::path& path);

}  // namespace pedsched
