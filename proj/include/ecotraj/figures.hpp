#pragma once

// Comparison data for the unconstrained, single-constraint and final
// trajectories of one instance, with a feasibility diagnosis.

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ecotraj/classifier.hpp"
#include "ecotraj/constrained.hpp"
#include "ecotraj/io.hpp"
#include "ecotraj/junctions.hpp"
#include "ecotraj/trajectory.hpp"

namespace ecotraj {

struct FigureFixture {
  std::string id;
  BoundaryConditions bc;
  Limits limits;
  std::optional<double> stated_speed_junction;  // junction time quoted with the figure
};

inline std::vector<FigureFixture> FigureFixtures() {
  return {
      {"paper-1", {0.0, 10.0, 0.0, 200.0, 13.4}, {0.0, 22.0, -kInf, 1.8}, 7.79},
      {"paper-2", {0.0, 10.0, 0.0, 200.0, 13.4}, {0.0, 23.0, -kInf, 1.35}, std::nullopt},
  };
}

inline std::optional<FigureFixture> FindFixture(std::string_view id) {
  for (const FigureFixture& f : FigureFixtures()) {
    if (f.id == id) return f;
  }
  return std::nullopt;
}

struct FigureSeries {
  std::string name;  // unconstrained, speed_only, control_only, final
  PiecewiseTrajectory trajectory;
};

struct FigureDiagnosis {
  ExclusionSide side = ExclusionSide::kNeither;
  bool speed_active = false;
  bool control_active = false;
  Envelope envelope;
  double distance = 0.0;
  bool jointly_feasible = false;
  std::optional<ConstraintCase> final_case;

  // Speed-only construction (other bound removed).
  std::optional<double> speed_junction;
  std::optional<double> stated_speed_junction;
  std::optional<bool> coupled_control;

  // Control-only construction (other bound removed).
  std::optional<double> control_junction;
  std::optional<double> speed_at_control_exit;
  std::optional<double> control_case_peak;
  std::optional<bool> coupled_speed;          // peak reaches the speed bound
  std::optional<bool> coupled_speed_printed;  // inequality exactly as printed

  std::vector<std::string> notes;
};

struct FigureData {
  std::vector<FigureSeries> series;
  FigureDiagnosis diagnosis;
};

inline FigureData BuildFigure(const BoundaryConditions& bc, const Limits& lim,
                              std::optional<double> stated_speed_junction = std::nullopt) {
  bc.Validate();
  lim.Validate();
  FigureData out;
  FigureDiagnosis& d = out.diagnosis;
  d.stated_speed_junction = stated_speed_junction;
  d.side = GetExclusionSide(bc);
  d.envelope = ReachableEnvelope(bc, lim);
  d.distance = bc.distance();
  d.jointly_feasible = IsFeasible(bc, lim);

  out.series.push_back({"unconstrained", SolveUnconstrainedCase(bc).trajectory});

  const bool max_side = d.side == ExclusionSide::kMaxSide;
  if (d.side != ExclusionSide::kNeither) {
    d.speed_active = max_side ? VmaxActive(bc, lim) : VminActive(bc, lim);
    d.control_active = max_side ? UmaxActive(bc, lim) : UminActive(bc, lim);
    const double U = max_side ? lim.umax : lim.umin;
    const double V = max_side ? lim.vmax : lim.vmin;

    Limits speed_only = lim;
    (max_side ? speed_only.umax : speed_only.umin) = max_side ? kInf : -kInf;
    Limits control_only = lim;
    (max_side ? control_only.vmax : control_only.vmin) = max_side ? kInf : 0.0;

    if (d.speed_active && IsFeasible(bc, speed_only)) {
      const Solution s = max_side ? SolveCase1(bc, speed_only) : SolveCase4(bc, speed_only);
      d.speed_junction = bc.t0 + detail::SpeedJunctionLocal(bc, V);
      d.coupled_control = detail::CoupledControlGivenSpeed(bc, U, V, *d.speed_junction - bc.t0);
      out.series.push_back({"speed_only", s.trajectory});
    }
    if (d.control_active && IsFeasible(bc, control_only)) {
      const Solution s = max_side ? SolveCase2(bc, control_only) : SolveCase5(bc, control_only);
      const double tau_c = detail::ControlJunctionLocal(bc, U);
      const double v_c = bc.v0 + U * tau_c;
      d.control_junction = bc.t0 + tau_c;
      d.speed_at_control_exit = v_c;
      d.control_case_peak = s.trajectory.Eval(bc.tm, Side::kLeft).speed;
      d.coupled_speed = detail::CoupledSpeedGivenControl(bc, U, V, tau_c);
      d.coupled_speed_printed = bc.horizon() >= tau_c + 2.0 * (v_c - V) / U;
      out.series.push_back({"control_only", s.trajectory});
    }
  }

  if (d.jointly_feasible) {
    const Solution s = Solve(bc, lim);
    d.final_case = s.trajectory.constraint_case;
    out.series.push_back({"final", s.trajectory});
  }

  auto fmt = [](double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return std::string(buf);
  };
  if (d.speed_junction && d.stated_speed_junction) {
    d.notes.push_back("speed junction from closed form " + fmt(*d.speed_junction) +
                      " s differs from the quoted " + fmt(*d.stated_speed_junction) + " s");
  }
  if (d.control_case_peak && d.speed_at_control_exit) {
    d.notes.push_back("control-only construction: speed " + fmt(*d.speed_at_control_exit) +
                      " m/s at junction " + fmt(*d.control_junction) + " s, peak " +
                      fmt(*d.control_case_peak) + " m/s");
  }
  if (!d.jointly_feasible) {
    d.notes.push_back("jointly infeasible: distance " + fmt(d.distance) +
                      " m outside reachable [" + fmt(d.envelope.min_distance) + ", " +
                      fmt(d.envelope.max_distance) + "] m");
  }
  return out;
}

/// Long-format rows `t_s,series,value`; series names are
/// `<trajectory>.<p|v|u>`.
inline void WritePlotData(std::ostream& os, const FigureData& fig, double resolution = 1e-2) {
  os << "t_s,series,value\n";
  for (const FigureSeries& s : fig.series) {
    const PiecewiseTrajectory& traj = s.trajectory;
    const auto n = static_cast<long>(std::llround((traj.t_end() - traj.t_start()) / resolution));
    for (const char* q : {"p", "v", "u"}) {
      for (long k = 0; k <= n; ++k) {
        const double t = k == n ? traj.t_end() : traj.t_start() + resolution * static_cast<double>(k);
        const State x = traj.Eval(t, k == n ? Side::kLeft : Side::kRight);
        const double value = q[0] == 'p' ? x.position : q[0] == 'v' ? x.speed : x.accel;
        os << FormatDouble(t) << ',' << s.name << '.' << q << ',' << FormatDouble(value) << '\n';
      }
    }
  }
}

inline void WriteDiagnosis(std::ostream& os, const FigureData& fig) {
  const FigureDiagnosis& d = fig.diagnosis;
  auto opt = [](const std::optional<double>& x) { return x ? FormatDouble(*x) : std::string("n/a"); };
  auto flag = [](const std::optional<bool>& x) {
    return x ? std::string(*x ? "true" : "false") : std::string("n/a");
  };
  os << "side: " << ToString(d.side) << '\n';
  os << "speed_bound_active: " << (d.speed_active ? "true" : "false") << '\n';
  os << "control_bound_active: " << (d.control_active ? "true" : "false") << '\n';
  os << "distance_m: " << FormatDouble(d.distance) << '\n';
  os << "reachable_min_m: " << FormatDouble(d.envelope.min_distance) << '\n';
  os << "reachable_max_m: " << FormatDouble(d.envelope.max_distance) << '\n';
  os << "jointly_feasible: " << (d.jointly_feasible ? "true" : "false") << '\n';
  os << "final_case: " << (d.final_case ? ToString(*d.final_case) : "none") << '\n';
  os << "speed_junction_s: " << opt(d.speed_junction) << '\n';
  os << "stated_speed_junction_s: " << opt(d.stated_speed_junction) << '\n';
  os << "control_bound_given_speed_arc: " << flag(d.coupled_control) << '\n';
  os << "control_junction_s: " << opt(d.control_junction) << '\n';
  os << "speed_at_control_junction_mps: " << opt(d.speed_at_control_exit) << '\n';
  os << "control_case_peak_mps: " << opt(d.control_case_peak) << '\n';
  os << "speed_bound_given_control_arc: " << flag(d.coupled_speed) << '\n';
  os << "speed_bound_given_control_arc_printed_form: " << flag(d.coupled_speed_printed) << '\n';
  for (const std::string& n : d.notes) os << "note: " << n << '\n';
}

}  // namespace ecotraj
