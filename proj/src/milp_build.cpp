#include "pedsched/milp_build.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace pedsched {

namespace {

char stage_char(Stage o) { return o == Stage::Horizontal ? 'H' : 'V'; }

std::string jk(int j, int k) { return "j" + std::to_string(j) + "_k" + std::to_string(k); }

}  // namespace

PedMilp build_milp(const PedScenario& scenario, const MilpOptions& options) {
  scenario.validate();
  const PedModel model(scenario.geometry, scenario.delta);  // geometry guard
  const CrosswalkGeometry& g = scenario.geometry;
  const int J = scenario.junction_count();
  const int N = scenario.steps;
  const double eps = options.epsilon;
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("epsilon must lie in (0, 1)");
  if (g.waiting_zone_capacity) {
    throw ValidationError("the program has no waiting-zone rows; drop waiting_zone_capacity");
  }

  const double rate = clearance_rate(g);
  const double x_first = rate * (scenario.delta - g.startup - g.walk_time());
  const double x_cont = rate * scenario.delta;

  // Largest possible crossing count: everything that is ever at the junction,
  // plus the largest capacity.
  double big_m = 0.0;
  for (const PedJunctionDemand& d : scenario.junctions) {
    Count total = 0;
    for (Count c : d.initial) total += c;
    for (const CornerCounts& a : d.arrivals) {
      for (Count c : a) total += c;
    }
    big_m = std::max(big_m, static_cast<double>(total + model.continuing_capacity()));
  }
  const double big_m1 = std::max<double>(N, std::ceil(x_cont) + 2.0);

  PedMilp out;
  MilpModel& m = out.model;
  PedMilpIndex& ix = out.index;
  ix.junctions = J;
  ix.steps = N;
  const auto jk_size = static_cast<std::size_t>(J) * N;
  ix.theta.assign(jk_size * kStageCount, -1);
  ix.delta.assign(jk_size * kStageCount, -1);
  ix.cap.assign(jk_size * kStageCount, -1);
  ix.flow.assign(jk_size * kStreamCount, -1);
  ix.volume.assign(jk_size * kCornerCount, -1);
  m.metadata() = {big_m, big_m1, eps};

  const auto& topo = JunctionTopology::standard();
  Objective& obj = m.objective();
  obj.minimize = true;

  for (int j = 0; j < J; ++j) {
    const PedJunctionDemand& d = scenario.junctions[static_cast<std::size_t>(j)];
    for (Count c : d.initial) obj.constant += scenario.delta * static_cast<double>(c);

    for (int k = 0; k < N; ++k) {
      const std::string tag = jk(j, k + 1);
      const auto ku = static_cast<std::size_t>(k);

      for (Stage o : {Stage::Horizontal, Stage::Vertical}) {
        ix.theta[ix.jko(j, k, o)] =
            m.add_variable("th_" + tag + "_" + stage_char(o), VarKind::Binary, 0.0, 1.0);
      }
      const double delta_fixed = (k == 0 && !d.prev_stage) ? 1.0 : 0.0;
      for (Stage o : {Stage::Horizontal, Stage::Vertical}) {
        const double lo = k == 0 ? delta_fixed : 0.0;
        const double hi = k == 0 ? delta_fixed : 1.0;
        ix.delta[ix.jko(j, k, o)] =
            m.add_variable("dl_" + tag + "_" + stage_char(o), VarKind::Binary, lo, hi);
      }
      for (Stage o : {Stage::Horizontal, Stage::Vertical}) {
        ix.cap[ix.jko(j, k, o)] =
            m.add_variable("cap_" + tag + "_" + stage_char(o), VarKind::Integer, 0.0, big_m1);
      }
      for (Stage o : {Stage::Horizontal, Stage::Vertical}) {
        for (const Stream& s : topo.enabled_by(o)) {
          const std::string name = "f_" + tag + "_" + stage_char(o) + std::to_string(s.from + 1) +
                                   std::to_string(s.to + 1);
          ix.flow[ix.jks(j, k, stream_id(o, s.from))] =
              m.add_variable(name, VarKind::Integer, 0.0, big_m);
        }
      }
      for (Corner i = 0; i < kCornerCount; ++i) {
        ix.volume[ix.jki(j, k, i)] = m.add_variable(
            "P_" + jk(j, k + 2) + "_" + std::to_string(i + 1), VarKind::Integer, 0.0, kInfinity);
      }

      // One green stage per interval.
      m.add_constraint("stage_" + tag,
                       {{ix.theta[ix.jko(j, k, Stage::Horizontal)], 1.0},
                        {ix.theta[ix.jko(j, k, Stage::Vertical)], 1.0}},
                       RowSense::Equal, 1.0);

      for (Stage o : {Stage::Horizontal, Stage::Vertical}) {
        const std::string so = tag + "_" + stage_char(o);
        const int th = ix.theta[ix.jko(j, k, o)];
        const int dl = ix.delta[ix.jko(j, k, o)];
        const int cp = ix.cap[ix.jko(j, k, o)];
        const double kk = k;  // k - 1 in 1-based terms

        // delta = 1 only in the first interval.
        m.add_constraint("deltalo_" + so, {{dl, big_m1}}, RowSense::LessEqual, big_m1 + kk);
        m.add_constraint("deltahi_" + so, {{dl, big_m1}}, RowSense::LessEqual, big_m1 - kk);

        // First interval: capacity = floor(x_first).
        m.add_constraint("capfirsthi_" + so, {{cp, 1.0}, {dl, big_m1}}, RowSense::LessEqual,
                         big_m1 + x_first);
        m.add_constraint("capfirstlo_" + so, {{cp, -1.0}, {dl, big_m1}}, RowSense::LessEqual,
                         big_m1 - eps - x_first + 1.0);

        // Later intervals: the light in k-1 picks first-green or continuing.
        std::vector<Term> prev_terms;
        double prev_const = 0.0;
        if (k > 0) {
          prev_terms.push_back({ix.theta[ix.jko(j, k - 1, o)], big_m1});
        } else if (d.prev_stage == o) {
          prev_const = big_m1;
        }
        auto with_prev = [&](double cap_coef, double prev_sign) {
          std::vector<Term> t{{cp, cap_coef}};
          for (const Term& p : prev_terms) t.push_back({p.var, prev_sign * p.coef});
          return t;
        };
        m.add_constraint("capredhi_" + so, with_prev(1.0, -1.0), RowSense::LessEqual,
                         x_first + prev_const);
        m.add_constraint("capredlo_" + so, with_prev(-1.0, -1.0), RowSense::LessEqual,
                         -eps - x_first + 1.0 + prev_const);
        m.add_constraint("capconthi_" + so, with_prev(1.0, 1.0), RowSense::LessEqual,
                         big_m1 + x_cont - prev_const);
        m.add_constraint("capcontlo_" + so, with_prev(-1.0, 1.0), RowSense::LessEqual,
                         big_m1 - eps - x_cont + 1.0 - prev_const);

        for (const Stream& s : topo.enabled_by(o)) {
          const int f = ix.flow[ix.jks(j, k, stream_id(o, s.from))];
          const std::string fs = so + std::to_string(s.from + 1) + std::to_string(s.to + 1);
          m.add_constraint("gate_" + fs, {{f, 1.0}, {th, -big_m}}, RowSense::LessEqual, 0.0);
          m.add_constraint("flowcap_" + fs, {{f, 1.0}, {cp, -1.0}}, RowSense::LessEqual, 0.0);
          const double eta = d.ratio(k, s.from, o);
          if (k == 0) {
            m.add_constraint("flowdem_" + fs, {{f, 1.0}}, RowSense::LessEqual,
                             eta * static_cast<double>(d.initial[static_cast<std::size_t>(s.from)]));
          } else {
            m.add_constraint("flowdem_" + fs,
                             {{f, 1.0}, {ix.volume[ix.jki(j, k - 1, s.from)], -eta}},
                             RowSense::LessEqual, 0.0);
          }
        }
      }

      // Dynamics with departures floor(gamma * inflow):
      //   I <= P(k+1) - P(k) + out - (1 - gamma) in <= I + 1 - eps.
      for (Corner i = 0; i < kCornerCount; ++i) {
        const double gamma = d.gamma[ku][static_cast<std::size_t>(i)];
        std::vector<Term> t{{ix.volume[ix.jki(j, k, i)], 1.0}};
        double rhs = static_cast<double>(d.arrivals[ku][static_cast<std::size_t>(i)]);
        if (k == 0) {
          rhs += static_cast<double>(d.initial[static_cast<std::size_t>(i)]);
        } else {
          t.push_back({ix.volume[ix.jki(j, k - 1, i)], -1.0});
        }
        for (Stage o : {Stage::Horizontal, Stage::Vertical}) {
          t.push_back({ix.flow[ix.jks(j, k, stream_id(o, i))], 1.0});
        }
        for (Stage o : {Stage::Horizontal, Stage::Vertical}) {
          t.push_back({ix.flow[ix.jks(j, k, stream_id(o, partner(i, o)))], -(1.0 - gamma)});
        }
        const std::string ci = tag + "_" + std::to_string(i + 1);
        m.add_constraint("dynlo_" + ci, t, RowSense::GreaterEqual, rhs);
        m.add_constraint("dynhi_" + ci, t, RowSense::LessEqual, rhs + 1.0 - eps);
      }

      // Delay: sum over corners of (P(k) - outgoing crossings) * delta.
      if (k > 0) {
        for (Corner i = 0; i < kCornerCount; ++i) {
          obj.terms.push_back({ix.volume[ix.jki(j, k - 1, i)], scenario.delta});
        }
      }
      for (int s = 0; s < kStreamCount; ++s) {
        obj.terms.push_back({ix.flow[ix.jks(j, k, s)], -scenario.delta});
      }
    }
  }
  m.validate();
  return out;
}

void fix_schedule(PedMilp& milp, const Schedule& schedule) {
  const PedMilpIndex& ix = milp.index;
  if (schedule.junctions() != ix.junctions || schedule.steps() != ix.steps) {
    throw ValidationError("schedule shape does not match the program");
  }
  auto& vars = milp.model.variables();
  for (int j = 0; j < ix.junctions; ++j) {
    for (int k = 0; k < ix.steps; ++k) {
      for (Stage o : {Stage::Horizontal, Stage::Vertical}) {
        Variable& v = vars[static_cast<std::size_t>(ix.theta[ix.jko(j, k, o)])];
        v.lower = v.upper = schedule.at(j, k) == o ? 1.0 : 0.0;
      }
    }
  }
}

std::vector<double> trace_assignment(const PedMilp& milp, const ThetaBits& theta,
                                     const PedTrace& trace) {
  const PedMilpIndex& ix = milp.index;
  if (theta.junctions != ix.junctions || theta.steps != ix.steps ||
      trace.junctions.size() != static_cast<std::size_t>(ix.junctions)) {
    throw ValidationError("trace shape does not match the program");
  }
  const auto& vars = milp.model.variables();
  std::vector<double> x(vars.size(), 0.0);
  for (int j = 0; j < ix.junctions; ++j) {
    const JunctionTrace& jt = trace.junctions[static_cast<std::size_t>(j)];
    if (jt.steps.size() != static_cast<std::size_t>(ix.steps)) {
      throw ValidationError("trace length does not match the program");
    }
    for (int k = 0; k < ix.steps; ++k) {
      const PedStep& st = jt.steps[static_cast<std::size_t>(k)];
      for (Stage o : {Stage::Horizontal, Stage::Vertical}) {
        x[static_cast<std::size_t>(ix.theta[ix.jko(j, k, o)])] = theta.at(j, k, o);
        const int dl = ix.delta[ix.jko(j, k, o)];
        x[static_cast<std::size_t>(dl)] = vars[static_cast<std::size_t>(dl)].upper > 0.5 && k == 0 ? 1.0 : 0.0;
        x[static_cast<std::size_t>(ix.cap[ix.jko(j, k, o)])] =
            static_cast<double>(st.capacity[static_cast<std::size_t>(index(o))]);
      }
      for (int s = 0; s < kStreamCount; ++s) {
        x[static_cast<std::size_t>(ix.flow[ix.jks(j, k, s)])] =
            static_cast<double>(st.flow[static_cast<std::size_t>(s)]);
      }
      const CornerCounts& next =
          k + 1 < ix.steps ? jt.steps[static_cast<std::size_t>(k) + 1].volume : jt.final_volume;
      for (Corner i = 0; i < kCornerCount; ++i) {
        x[static_cast<std::size_t>(ix.volume[ix.jki(j, k, i)])] =
            static_cast<double>(next[static_cast<std::size_t>(i)]);
      }
    }
  }
  return x;
}

std::vector<std::string> TraceCheckReport::families() const {
  std::set<std::string> f;
  for (const RowViolation& v : violations) f.insert(v.family);
  return {f.begin(), f.end()};
}

TraceCheckReport check_assignment(const MilpModel& model, const std::vector<double>& x,
                                  double tolerance) {
  TraceCheckReport report;
  const auto& rows = model.constraints();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double v = rows[r].violation(x);
    if (v > tolerance) {
      report.violations.push_back({static_cast<int>(r), rows[r].name, rows[r].family(), v});
    }
  }
  report.rows_checked = static_cast<int>(rows.size());
  return report;
}

TraceCheckReport check_trace(const PedMilp& milp, const ThetaBits& theta, const PedTrace& trace,
                             double tolerance) {
  return check_assignment(milp.model, trace_assignment(milp, theta, trace), tolerance);
}

}  // namespace pedsched
