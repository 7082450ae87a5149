#pragma once

#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace pedsched {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarKind { Binary, Integer, Continuous };
enum class RowSense { LessEqual, GreaterEqual, Equal };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = kInfinity;

  friend bool operator==(const Variable&, const Variable&) = default;
};

struct Term {
  int var = -1;
  double coef = 0.0;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Row names are "<family>_<suffix>"; the family never contains '_'.
struct Constraint {
  std::string name;
  std::vector<Term> terms;
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;

  std::string family() const { return name.substr(0, name.find('_')); }
  double activity(const std::vector<double>& x) const;
  /// How far x is from satisfying the row; 0 when satisfied.
  double violation(const std::vector<double>& x) const;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct Objective {
  bool minimize = true;
  std::vector<Term> terms;
  double constant = 0.0;

  double value(const std::vector<double>& x) const;

  friend bool operator==(const Objective&, const Objective&) = default;
};

/// Linearisation constants recorded with the model.
struct MilpMetadata {
  double big_m = 0.0;
  double big_m1 = 0.0;
  double epsilon = 0.0;

  friend bool operator==(const MilpMetadata&, const MilpMetadata&) = default;
};

class MilpModel {
 public:
  int add_variable(std::string name, VarKind kind, double lower, double upper);
  void add_constraint(std::string name, std::vector<Term> terms, RowSense sense, double rhs);

  const std::vector<Variable>& variables() const { return variables_; }
  std::vector<Variable>& variables() { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  Objective& objective() { return objective_; }
  const Objective& objective() const { return objective_; }
  MilpMetadata& metadata() { return metadata_; }
  const MilpMetadata& metadata() const { return metadata_; }

  int variable_count() const { return static_cast<int>(variables_.size()); }
  int constraint_count() const { return static_cast<int>(constraints_.size()); }
  int count(VarKind kind) const;

  /// -1 when absent.
  int find_variable(const std::string& name) const;

  /// Throws ModelError on dangling variable references, duplicate names or
  /// inverted bounds.
  void validate() const;

  friend bool operator==(const MilpModel& a, const MilpModel& b) {
    return a.variables_ == b.variables_ && a.constraints_ == b.constraints_ &&
           a.objective_ == b.objective_;
  }

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  Objective objective_;
  MilpMetadata metadata_;
  std::unordered_map<std::string, int> by_name_;
};

const char* to_string(VarKind k);

}  // namespace pedsched
