#include "pedsched/milp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pedsched/common.hpp"

namespace pedsched {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NodeLimit: return "node_limit";
  }
  return "?";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr long kMaxPivots = 200000;

bool is_integral(VarKind k) { return k != VarKind::Continuous; }

/// Tightens bounds from single-variable rows until nothing changes.  Rows
/// turned into bounds are switched off.  Returns false on infeasibility.
bool presolve(const MilpModel& m, std::vector<double>& lo, std::vector<double>& hi,
              std::vector<char>& active, bool round_integers, double tol) {
  const auto& rows = m.constraints();
  const auto& vars = m.variables();
  auto tighten = [&](int v, double new_lo, double new_hi) {
    const auto vi = static_cast<std::size_t>(v);
    if (round_integers && is_integral(vars[vi].kind)) {
      new_lo = std::ceil(new_lo - tol);
      new_hi = std::floor(new_hi + tol);
    }
    bool changed = false;
    if (new_lo > lo[vi]) { lo[vi] = new_lo; changed = true; }
    if (new_hi < hi[vi]) { hi[vi] = new_hi; changed = true; }
    return changed;
  };
  for (std::size_t v = 0; v < vars.size(); ++v) {
    tighten(static_cast<int>(v), lo[v], hi[v]);
    if (lo[v] > hi[v] + tol) return false;
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!active[r]) continue;
      const Constraint& c = rows[r];
      double fixed = 0.0;
      int free_var = -1;
      double free_coef = 0.0;
      int free_count = 0;
      for (const Term& t : c.terms) {
        if (t.coef == 0.0) continue;
        const auto vi = static_cast<std::size_t>(t.var);
        if (hi[vi] - lo[vi] <= tol) {
          fixed += t.coef * lo[vi];
        } else {
          ++free_count;
          free_var = t.var;
          free_coef += t.coef;
          if (free_count > 1) break;
        }
      }
      if (free_count > 1) continue;
      const double rest = c.rhs - fixed;
      if (free_count == 0) {
        const bool ok = (c.sense == RowSense::LessEqual && rest >= -tol) ||
                        (c.sense == RowSense::GreaterEqual && rest <= tol) ||
                        (c.sense == RowSense::Equal && std::abs(rest) <= tol);
        if (!ok) return false;
        active[r] = 0;
        continue;
      }
      if (std::abs(free_coef) <= kPivotTol) continue;
      const double bound = rest / free_coef;
      double nlo = -kInfinity, nhi = kInfinity;
      const bool upper = (c.sense == RowSense::LessEqual) == (free_coef > 0);
      if (c.sense == RowSense::Equal) {
        nlo = nhi = bound;
      } else if (upper) {
        nhi = bound;
      } else {
        nlo = bound;
      }
      if (tighten(free_var, nlo, nhi)) changed = true;
      active[r] = 0;
      const auto fi = static_cast<std::size_t>(free_var);
      if (lo[fi] > hi[fi] + tol) return false;
      if (lo[fi] > hi[fi]) hi[fi] = lo[fi];
    }
  }
  return true;
}

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpOutcome {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
};

/// Dense tableau simplex over y >= 0 for rows A y (sense) b, minimising c y.
class Tableau {
 public:
  Tableau(const std::vector<std::vector<double>>& a, const std::vector<RowSense>& sense,
          const std::vector<double>& b, const std::vector<double>& c)
      : m_(static_cast<int>(a.size())), ny_(static_cast<int>(c.size())) {
    int slacks = 0, arts = 0;
    std::vector<RowSense> s = sense;
    std::vector<double> rhs = b;
    std::vector<double> flip(static_cast<std::size_t>(m_), 1.0);
    for (int i = 0; i < m_; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      if (rhs[iu] < 0) {
        flip[iu] = -1.0;
        rhs[iu] = -rhs[iu];
        if (s[iu] == RowSense::LessEqual) s[iu] = RowSense::GreaterEqual;
        else if (s[iu] == RowSense::GreaterEqual) s[iu] = RowSense::LessEqual;
      }
      if (s[iu] != RowSense::Equal) ++slacks;
      if (s[iu] != RowSense::LessEqual) ++arts;
    }
    art_begin_ = ny_ + slacks;
    ncol_ = art_begin_ + arts;
    width_ = ncol_ + 1;
    t_.assign(static_cast<std::size_t>(m_ + 1) * width_, 0.0);
    basis_.assign(static_cast<std::size_t>(m_), -1);
    int next_slack = ny_, next_art = art_begin_;
    for (int i = 0; i < m_; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      for (int j = 0; j < ny_; ++j) at(i, j) = flip[iu] * a[iu][static_cast<std::size_t>(j)];
      at(i, ncol_) = rhs[iu];
      if (s[iu] == RowSense::LessEqual) {
        at(i, next_slack) = 1.0;
        basis_[iu] = next_slack++;
      } else {
        if (s[iu] == RowSense::GreaterEqual) at(i, next_slack++) = -1.0;
        at(i, next_art) = 1.0;
        basis_[iu] = next_art++;
      }
    }
    cost_ = c;
  }

  LpStatus solve() {
    // Phase 1: drive the artificials out.
    if (art_begin_ < ncol_) {
      for (int j = 0; j <= ncol_; ++j) at(m_, j) = 0.0;
      for (int j = art_begin_; j < ncol_; ++j) at(m_, j) = 1.0;
      for (int i = 0; i < m_; ++i) {
        if (basis_[static_cast<std::size_t>(i)] >= art_begin_) {
          for (int j = 0; j <= ncol_; ++j) at(m_, j) -= at(i, j);
        }
      }
      if (iterate(ncol_) == LpStatus::Unbounded) throw ModelError("phase one cannot be unbounded");
      if (-at(m_, ncol_) > 1e-7) return LpStatus::Infeasible;
      for (int i = 0; i < m_; ++i) {
        if (basis_[static_cast<std::size_t>(i)] < art_begin_) continue;
        for (int j = 0; j < art_begin_; ++j) {
          if (std::abs(at(i, j)) > kPivotTol) {
            pivot(i, j);
            break;
          }
        }
      }
    }
    // Phase 2 on the original costs; artificials may no longer enter.
    for (int j = 0; j <= ncol_; ++j) at(m_, j) = j < ny_ ? cost_[static_cast<std::size_t>(j)] : 0.0;
    for (int i = 0; i < m_; ++i) {
      const int bj = basis_[static_cast<std::size_t>(i)];
      const double cb = bj < ny_ ? cost_[static_cast<std::size_t>(bj)] : 0.0;
      if (cb == 0.0) continue;
      for (int j = 0; j <= ncol_; ++j) at(m_, j) -= cb * at(i, j);
    }
    return iterate(art_begin_);
  }

  std::vector<double> primal() const {
    std::vector<double> y(static_cast<std::size_t>(ny_), 0.0);
    for (int i = 0; i < m_; ++i) {
      const int bj = basis_[static_cast<std::size_t>(i)];
      if (bj < ny_) y[static_cast<std::size_t>(bj)] = at(i, ncol_);
    }
    return y;
  }

 private:
  double& at(int i, int j) { return t_[static_cast<std::size_t>(i) * width_ + j]; }
  double at(int i, int j) const { return t_[static_cast<std::size_t>(i) * width_ + j]; }

  LpStatus iterate(int allowed_cols) {
    for (long it = 0; it < kMaxPivots; ++it) {
      int enter = -1;
      for (int j = 0; j < allowed_cols; ++j) {
        if (at(m_, j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::Optimal;
      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double a = at(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = at(i, ncol_) / a;
        if (leave < 0 || ratio < best - 1e-12 ||
            (ratio <= best + 1e-12 && basis_[static_cast<std::size_t>(i)] <
                                          basis_[static_cast<std::size_t>(leave)])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      pivot(leave, enter);
    }
    throw SolverGuardError("simplex pivot limit reached");
  }

  void pivot(int r, int c) {
    const double p = at(r, c);
    for (int j = 0; j <= ncol_; ++j) at(r, j) /= p;
    at(r, c) = 1.0;
    for (int i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (int j = 0; j <= ncol_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  int m_;
  int ny_;
  int art_begin_ = 0;
  int ncol_ = 0;
  int width_ = 0;
  std::vector<double> t_;
  std::vector<int> basis_;
  std::vector<double> cost_;
};

/// LP over the given bounds.  Objective is minimised with sign applied.
LpOutcome relax(const MilpModel& model, std::vector<double> lo, std::vector<double> hi,
                double sign, bool round_integers, double tol) {
  std::vector<char> active(model.constraints().size(), 1);
  if (!presolve(model, lo, hi, active, round_integers, tol)) return {};

  const auto n = static_cast<std::size_t>(model.variable_count());
  // Column map: x = base + dir * y[col] (- y[col2] for free variables).
  std::vector<int> col(n, -1), col2(n, -1);
  std::vector<double> base(n, 0.0), dir(n, 1.0);
  int ny = 0;
  std::vector<std::pair<int, double>> upper_rows;  // y[col] <= value
  for (std::size_t v = 0; v < n; ++v) {
    if (hi[v] - lo[v] <= tol) {
      base[v] = lo[v];
      continue;
    }
    if (std::isfinite(lo[v])) {
      base[v] = lo[v];
      col[v] = ny++;
      if (std::isfinite(hi[v])) upper_rows.emplace_back(col[v], hi[v] - lo[v]);
    } else if (std::isfinite(hi[v])) {
      base[v] = hi[v];
      dir[v] = -1.0;
      col[v] = ny++;
    } else {
      col[v] = ny++;
      col2[v] = ny++;
    }
  }

  std::vector<double> c(static_cast<std::size_t>(ny), 0.0);
  for (const Term& t : model.objective().terms) {
    const auto v = static_cast<std::size_t>(t.var);
    if (col[v] >= 0) c[static_cast<std::size_t>(col[v])] += sign * t.coef * dir[v];
    if (col2[v] >= 0) c[static_cast<std::size_t>(col2[v])] -= sign * t.coef;
  }

  std::vector<std::vector<double>> a;
  std::vector<RowSense> sense;
  std::vector<double> b;
  const auto& rows = model.constraints();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!active[r]) continue;
    std::vector<double> row(static_cast<std::size_t>(ny), 0.0);
    double rhs = rows[r].rhs;
    for (const Term& t : rows[r].terms) {
      const auto v = static_cast<std::size_t>(t.var);
      rhs -= t.coef * base[v];
      if (col[v] >= 0) row[static_cast<std::size_t>(col[v])] += t.coef * dir[v];
      if (col2[v] >= 0) row[static_cast<std::size_t>(col2[v])] -= t.coef;
    }
    a.push_back(std::move(row));
    sense.push_back(rows[r].sense);
    b.push_back(rhs);
  }
  for (const auto& [cidx, value] : upper_rows) {
    std::vector<double> row(static_cast<std::size_t>(ny), 0.0);
    row[static_cast<std::size_t>(cidx)] = 1.0;
    a.push_back(std::move(row));
    sense.push_back(RowSense::LessEqual);
    b.push_back(value);
  }

  Tableau tab(a, sense, b, c);
  LpOutcome out;
  out.status = tab.solve();
  if (out.status != LpStatus::Optimal) return out;
  const auto y = tab.primal();
  out.x.assign(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    double x = base[v];
    if (col[v] >= 0) x += dir[v] * y[static_cast<std::size_t>(col[v])];
    if (col2[v] >= 0) x -= y[static_cast<std::size_t>(col2[v])];
    out.x[v] = x;
  }
  return out;
}

struct Node {
  std::vector<double> lo;
  std::vector<double> hi;
};

}  // namespace

MilpSolution solve_lp(const MilpModel& model, const MilpSolverOptions& options) {
  std::vector<double> lo, hi;
  for (const Variable& v : model.variables()) {
    lo.push_back(v.lower);
    hi.push_back(v.upper);
  }
  const double sign = model.objective().minimize ? 1.0 : -1.0;
  const LpOutcome lp = relax(model, lo, hi, sign, false, options.feasibility_tolerance);
  MilpSolution sol;
  sol.nodes = 1;
  if (lp.status == LpStatus::Infeasible) return sol;
  if (lp.status == LpStatus::Unbounded) {
    sol.status = SolveStatus::Unbounded;
    return sol;
  }
  sol.status = SolveStatus::Optimal;
  sol.values = lp.x;
  sol.objective = model.objective().value(sol.values);
  return sol;
}

MilpSolution solve_milp(const MilpModel& model, const MilpSolverOptions& options) {
  model.validate();
  const auto& vars = model.variables();
  const double sign = model.objective().minimize ? 1.0 : -1.0;
  const double tol = options.feasibility_tolerance;

  MilpSolution best;
  bool have = false;
  double best_val = kInfinity;

  std::vector<Node> stack;
  Node root;
  for (const Variable& v : vars) {
    root.lo.push_back(v.lower);
    root.hi.push_back(v.upper);
  }
  stack.push_back(std::move(root));

  while (!stack.empty()) {
    if (best.nodes >= options.node_limit) {
      best.status = SolveStatus::NodeLimit;
      return best;
    }
    Node node = std::move(stack.back());
    stack.pop_back();
    ++best.nodes;

    const LpOutcome lp = relax(model, node.lo, node.hi, sign, true, tol);
    if (lp.status == LpStatus::Infeasible) continue;
    if (lp.status == LpStatus::Unbounded) {
      best.status = SolveStatus::Unbounded;
      return best;
    }
    const double val = sign * model.objective().value(lp.x);
    if (have && val >= best_val - 1e-9 * std::max(1.0, std::abs(best_val))) continue;

    // Binaries first: once the switching pattern is fixed the rest of the
    // program is nearly determined by presolve.
    int branch = -1;
    for (VarKind kind : {VarKind::Binary, VarKind::Integer}) {
      for (std::size_t v = 0; v < vars.size() && branch < 0; ++v) {
        if (vars[v].kind != kind) continue;
        if (std::abs(lp.x[v] - std::round(lp.x[v])) > options.integrality_tolerance) {
          branch = static_cast<int>(v);
        }
      }
      if (branch >= 0) break;
    }
    if (branch < 0) {
      have = true;
      best_val = val;
      best.values = lp.x;
      for (std::size_t v = 0; v < vars.size(); ++v) {
        if (is_integral(vars[v].kind)) best.values[v] = std::round(best.values[v]);
      }
      continue;
    }
    const auto bu = static_cast<std::size_t>(branch);
    Node up = node;
    up.lo[bu] = std::ceil(lp.x[bu]);
    node.hi[bu] = std::floor(lp.x[bu]);
    stack.push_back(std::move(up));
    stack.push_back(std::move(node));  // explored first
  }
  if (!have) {
    best.status = SolveStatus::Infeasible;
    return best;
  }
  best.status = SolveStatus::Optimal;
  best.objective = model.objective().value(best.values);
  return best;
}

MilpSolution maximize_served_flow(const PedMilp& milp, const Schedule& schedule,
                                  const MilpSolverOptions& options) {
  PedMilp fixed = milp;
  fix_schedule(fixed, schedule);
  const PedMilpIndex& ix = fixed.index;

  // Interval owning each variable; rows are kept in the interval-k program
  // only when all their variables belong to intervals up to k, so later
  // intervals cannot force extra branching.
  std::vector<int> owner(static_cast<std::size_t>(fixed.model.variable_count()), 0);
  for (int j = 0; j < ix.junctions; ++j) {
    for (int k = 0; k < ix.steps; ++k) {
      for (Stage o : {Stage::Horizontal, Stage::Vertical}) {
        owner[static_cast<std::size_t>(ix.theta[ix.jko(j, k, o)])] = k;
        owner[static_cast<std::size_t>(ix.delta[ix.jko(j, k, o)])] = k;
        owner[static_cast<std::size_t>(ix.cap[ix.jko(j, k, o)])] = k;
      }
      for (int s = 0; s < kStreamCount; ++s) owner[static_cast<std::size_t>(ix.flow[ix.jks(j, k, s)])] = k;
      for (Corner i = 0; i < kCornerCount; ++i) {
        owner[static_cast<std::size_t>(ix.volume[ix.jki(j, k, i)])] = k;
      }
    }
  }
  std::vector<int> row_interval;
  for (const Constraint& c : fixed.model.constraints()) {
    int last = 0;
    for (const Term& t : c.terms) last = std::max(last, owner[static_cast<std::size_t>(t.var)]);
    row_interval.push_back(last);
  }

  std::vector<Variable> vars = fixed.model.variables();
  MilpSolution sol;
  long nodes = 0;
  for (int k = 0; k < ix.steps; ++k) {
    MilpModel step;
    for (const Variable& v : vars) step.add_variable(v.name, v.kind, v.lower, v.upper);
    const auto& rows = fixed.model.constraints();
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (row_interval[r] <= k) step.add_constraint(rows[r].name, rows[r].terms, rows[r].sense, rows[r].rhs);
    }
    Objective& obj = step.objective();
    obj.minimize = false;
    for (int j = 0; j < ix.junctions; ++j) {
      for (int s = 0; s < kStreamCount; ++s) obj.terms.push_back({ix.flow[ix.jks(j, k, s)], 1.0});
    }
    sol = solve_milp(step, options);
    nodes += sol.nodes;
    if (sol.status != SolveStatus::Optimal) break;
    // Freeze everything owned by interval k.
    for (std::size_t v = 0; v < vars.size(); ++v) {
      if (owner[v] == k) vars[v].lower = vars[v].upper = sol.values[v];
    }
  }
  sol.nodes = nodes;
  if (sol.status == SolveStatus::Optimal) sol.objective = milp.model.objective().value(sol.values);
  return sol;
}

}  // namespace pedsched
