#include "pedsched/milp_model.hpp"

#include <algorithm>
#include <unordered_set>

#include "pedsched/common.hpp"

namespace pedsched {

double Constraint::activity(const std::vector<double>& x) const {
  double s = 0.0;
  for (const Term& t : terms) s += t.coef * x[static_cast<std::size_t>(t.var)];
  return s;
}

double Constraint::violation(const std::vector<double>& x) const {
  const double a = activity(x);
  switch (sense) {
    case RowSense::LessEqual: return std::max(0.0, a - rhs);
    case RowSense::GreaterEqual: return std::max(0.0, rhs - a);
    case RowSense::Equal: return std::abs(a - rhs);
  }
  return 0.0;
}

double Objective::value(const std::vector<double>& x) const {
  double s = constant;
  for (const Term& t : terms) s += t.coef * x[static_cast<std::size_t>(t.var)];
  return s;
}

int MilpModel::add_variable(std::string name, VarKind kind, double lower, double upper) {
  const int id = static_cast<int>(variables_.size());
  if (!by_name_.emplace(name, id).second) throw ModelError("duplicate variable " + name);
  variables_.push_back({std::move(name), kind, lower, upper});
  return id;
}

void MilpModel::add_constraint(std::string name, std::vector<Term> terms, RowSense sense,
                               double rhs) {
  constraints_.push_back({std::move(name), std::move(terms), sense, rhs});
}

int MilpModel::count(VarKind kind) const {
  return static_cast<int>(std::count_if(variables_.begin(), variables_.end(),
                                        [&](const Variable& v) { return v.kind == kind; }));
}

int MilpModel::find_variable(const std::string& name) const {
  const auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

void MilpModel::validate() const {
  const int n = variable_count();
  auto check_terms = [&](const std::vector<Term>& terms, const std::string& where) {
    for (const Term& t : terms) {
      if (t.var < 0 || t.var >= n) throw ModelError(where + " references an undeclared variable");
    }
  };
  for (const Variable& v : variables_) {
    if (v.lower > v.upper) throw ModelError("variable " + v.name + " has inverted bounds");
  }
  std::unordered_set<std::string> names;
  for (const Constraint& c : constraints_) {
    if (!names.insert(c.name).second) throw ModelError("duplicate constraint " + c.name);
    check_terms(c.terms, "constraint " + c.name);
  }
  check_terms(objective_.terms, "objective");
}

const char* to_string(VarKind k) {
  switch (k) {
    case VarKind::Binary: return "binary";
    case VarKind::Integer: return "integer";
    case VarKind::Continuous: return "continuous";
  }
  return "?";
}

}  // namespace pedsched
