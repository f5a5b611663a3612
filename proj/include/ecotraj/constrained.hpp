#pragma once

// Closed-form optimal trajectories for every constraint case, with the
// matching costate and multiplier profile.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ecotraj/classifier.hpp"
#include "ecotraj/junctions.hpp"
#include "ecotraj/trajectory.hpp"
#include "ecotraj/unconstrained.hpp"

namespace ecotraj {

struct Solution {
  PiecewiseTrajectory trajectory;
  CostateProfile costates;
};

namespace detail {

// Arcs and costate segments in local time (t0 = 0, p0 = 0).
struct LocalBuild {
  std::vector<PolyArc> arcs;
  std::vector<CostateSegment> segments;
  ConstraintCase label = ConstraintCase::kUnconstrained;
  bool check_signs = true;
};

inline CostateSegment ShiftSegment(CostateSegment s, double t0) {
  s.t_start += t0;
  s.t_end += t0;
  s.lambda_v0 -= s.lambda_v1 * t0;
  s.mu_a0 -= s.mu_a1 * t0;
  s.mu_b0 -= s.mu_b1 * t0;
  return s;
}

inline void RequireNonNegative(const CostateSegment& s, double scale) {
  const double tol = -1e-9 * scale;
  const double values[] = {s.mu_a0 + s.mu_a1 * s.t_start, s.mu_a0 + s.mu_a1 * s.t_end,
                           s.mu_b0 + s.mu_b1 * s.t_start, s.mu_b0 + s.mu_b1 * s.t_end,
                           s.eta_c, s.eta_d};
  for (double v : values) {
    if (v < tol) {
      throw Error(ErrorCode::kInconsistentCase,
                  "negative multiplier " + std::to_string(v) + " on segment starting at " +
                      std::to_string(s.t_start));
    }
  }
}

inline Solution Finalize(const LocalBuild& local, const BoundaryConditions& bc) {
  Solution out;
  PiecewiseTrajectory& traj = out.trajectory;
  traj.constraint_case = local.label;
  double scale = 1.0;
  for (const PolyArc& arc : local.arcs) {
    traj.arcs.push_back(ToAbsolute(arc, bc.t0, bc.p0));
    scale = std::max({scale, std::abs(arc.b), std::abs(arc.a) * bc.horizon()});
  }
  traj.arcs.front().t_start = bc.t0;
  traj.arcs.back().t_end = bc.tm;
  for (std::size_t i = 0; i + 1 < traj.arcs.size(); ++i) {
    traj.arcs[i + 1].t_start = traj.arcs[i].t_end;
    traj.junctions.push_back(traj.arcs[i].t_end);
  }
  PolyArc& last = traj.arcs.back();
  if (last.kind == ArcKind::kUnconstrained) last.b = -last.a * bc.tm;
  for (std::size_t i = 0; i < local.segments.size(); ++i) {
    CostateSegment s = ShiftSegment(local.segments[i], bc.t0);
    s.t_start = traj.arcs[i].t_start;
    s.t_end = traj.arcs[i].t_end;
    if (i + 1 == local.segments.size() && last.kind == ArcKind::kUnconstrained) {
      s.lambda_v0 = -s.lambda_v1 * bc.tm;
    }
    if (local.check_signs) RequireNonNegative(s, scale);
    out.costates.segments.push_back(s);
  }
  return out;
}

inline CostateSegment FreeArcSegment(double a, double b, double t_start, double t_end) {
  CostateSegment s;
  s.t_start = t_start;
  s.t_end = t_end;
  s.lambda_p = a;
  s.lambda_v0 = -b;
  s.lambda_v1 = -a;
  return s;
}

// Saturated control U on [t_start, t_end] next to a free arc with slope a, offset b.
inline CostateSegment ControlArcSegment(double a, double b, double U, double t_start,
                                        double t_end) {
  CostateSegment s = FreeArcSegment(a, b, t_start, t_end);
  if (U > 0.0) {
    s.mu_a0 = b - U;
    s.mu_a1 = a;
  } else {
    s.mu_b0 = U - b;
    s.mu_b1 = -a;
  }
  return s;
}

// Speed held at its bound; lambda_v vanishes and the state multiplier
// absorbs lambda_p.
inline CostateSegment SpeedArcSegment(double lambda_p, bool upper, double t_start,
                                      double t_end) {
  CostateSegment s;
  s.t_start = t_start;
  s.t_end = t_end;
  s.lambda_p = lambda_p;
  if (upper) {
    s.eta_c = -lambda_p;
  } else {
    s.eta_d = lambda_p;
  }
  return s;
}

inline LocalBuild BuildUnconstrained(const BoundaryConditions& bc) {
  LocalBuild b;
  const double T = bc.horizon();
  PolyArc arc{0.0, 0.0, bc.v0, 0.0, 0.0, T, ArcKind::kUnconstrained};
  if (!IsCruise(bc)) {
    arc.a = 3.0 * (bc.v0 * T - bc.distance()) / (T * T * T);
    arc.b = -arc.a * T;
  }
  b.arcs.push_back(arc);
  b.segments.push_back(FreeArcSegment(arc.a, arc.b, 0.0, T));
  b.label = ConstraintCase::kUnconstrained;
  return b;
}

inline LocalBuild BuildSpeedCase(const BoundaryConditions& bc, double V, bool upper) {
  const double T = bc.horizon();
  const double tau_s = SpeedJunctionLocal(bc, V);
  if (T - tau_s < kMinArcDuration) return BuildUnconstrained(bc);
  const ArcKind kind = upper ? ArcKind::kSpeedMax : ArcKind::kSpeedMin;
  LocalBuild b;
  b.label = upper ? ConstraintCase::kVmaxOnly : ConstraintCase::kVminOnly;
  if (tau_s < kMinArcDuration) {
    b.arcs.push_back(PolyArc{0.0, 0.0, V, 0.0, 0.0, T, kind});
    b.segments.push_back(SpeedArcSegment(0.0, upper, 0.0, T));
    return b;
  }
  const double a1 = 2.0 * (bc.v0 - V) / (tau_s * tau_s);
  const double b1 = -a1 * tau_s;
  const PolyArc free{a1, b1, bc.v0, 0.0, 0.0, tau_s, ArcKind::kUnconstrained};
  const State end = free.At(tau_s);
  b.arcs.push_back(free);
  b.arcs.push_back(ArcThrough(0.0, 0.0, tau_s, end.position, V, tau_s, T, kind));
  b.segments.push_back(FreeArcSegment(a1, b1, 0.0, tau_s));
  b.segments.push_back(SpeedArcSegment(a1, upper, tau_s, T));
  return b;
}

inline LocalBuild BuildControlCase(const BoundaryConditions& bc, double U) {
  const double T = bc.horizon();
  const double tau_c = ControlJunctionLocal(bc, U);
  if (tau_c < kMinArcDuration) return BuildUnconstrained(bc);
  const bool upper = U > 0.0;
  const ArcKind kind = upper ? ArcKind::kControlMax : ArcKind::kControlMin;
  LocalBuild b;
  b.label = upper ? ConstraintCase::kUmaxOnly : ConstraintCase::kUminOnly;
  const double s = T - tau_c;
  if (s < kMinArcDuration) {
    // Saturated over the whole horizon: the free-end condition cannot hold.
    b.arcs.push_back(PolyArc{0.0, U, bc.v0, 0.0, 0.0, T, kind});
    b.segments.push_back(CostateSegment{0.0, T});
    b.check_signs = false;
    return b;
  }
  const double a2 = -U / s;
  const double b2 = -a2 * T;
  const PolyArc saturated{0.0, U, bc.v0, 0.0, 0.0, tau_c, kind};
  const State end = saturated.At(tau_c);
  b.arcs.push_back(saturated);
  b.arcs.push_back(
      ArcThrough(a2, b2, tau_c, end.position, end.speed, tau_c, T, ArcKind::kUnconstrained));
  b.segments.push_back(ControlArcSegment(a2, b2, U, 0.0, tau_c));
  b.segments.push_back(FreeArcSegment(a2, b2, tau_c, T));
  return b;
}

inline LocalBuild BuildDualCase(const BoundaryConditions& bc, double U, double V) {
  const double T = bc.horizon();
  const JunctionPair j = DualJunctionsLocal(bc, U, V);
  const bool upper = U > 0.0;
  if (j.tau_c < kMinArcDuration) return BuildSpeedCase(bc, V, upper);
  if (T - j.tau_s < kMinArcDuration) return BuildControlCase(bc, U);
  const ArcKind control_kind = upper ? ArcKind::kControlMax : ArcKind::kControlMin;
  const ArcKind speed_kind = upper ? ArcKind::kSpeedMax : ArcKind::kSpeedMin;
  LocalBuild b;
  b.label = upper ? ConstraintCase::kUmaxAndVmax : ConstraintCase::kUminAndVmin;
  const PolyArc saturated{0.0, U, bc.v0, 0.0, 0.0, j.tau_c, control_kind};
  const State c_end = saturated.At(j.tau_c);
  const double w = j.tau_s - j.tau_c;
  if (w < kMinArcDuration) {
    // Extreme of the envelope: saturate, then hold the speed bound.
    b.arcs.push_back(saturated);
    b.arcs.push_back(ArcThrough(0.0, 0.0, j.tau_c, c_end.position, V, j.tau_c, T, speed_kind));
    b.segments.push_back(CostateSegment{0.0, j.tau_c});
    b.segments.push_back(CostateSegment{j.tau_c, T});
    b.check_signs = false;
    return b;
  }
  const double a2 = -U / w;
  const double b2 = -a2 * j.tau_s;
  const PolyArc middle = ArcThrough(a2, b2, j.tau_c, c_end.position, c_end.speed, j.tau_c,
                                    j.tau_s, ArcKind::kUnconstrained);
  const State m_end = middle.At(j.tau_s);
  b.arcs.push_back(saturated);
  b.arcs.push_back(middle);
  b.arcs.push_back(ArcThrough(0.0, 0.0, j.tau_s, m_end.position, V, j.tau_s, T, speed_kind));
  b.segments.push_back(ControlArcSegment(a2, b2, U, 0.0, j.tau_c));
  b.segments.push_back(FreeArcSegment(a2, b2, j.tau_c, j.tau_s));
  b.segments.push_back(SpeedArcSegment(a2, upper, j.tau_s, T));
  return b;
}

}  // namespace detail

/// Unconstrained cubic wrapped as a one-arc solution.
inline Solution SolveUnconstrainedCase(const BoundaryConditions& bc) {
  bc.Validate();
  return detail::Finalize(detail::BuildUnconstrained(bc), bc);
}

/// vmax only: free arc ending at vmax with zero control, then cruise at vmax.
inline Solution SolveCase1(const BoundaryConditions& bc, const Limits& lim) {
  RequireFeasible(bc, lim);
  return detail::Finalize(detail::BuildSpeedCase(bc, lim.vmax, true), bc);
}

/// umax only: full throttle from t0, then a free arc ending with zero control.
inline Solution SolveCase2(const BoundaryConditions& bc, const Limits& lim) {
  RequireFeasible(bc, lim);
  return detail::Finalize(detail::BuildControlCase(bc, lim.umax), bc);
}

/// umax then vmax: saturated, free, then cruise at vmax.
inline Solution SolveCase3(const BoundaryConditions& bc, const Limits& lim) {
  RequireFeasible(bc, lim);
  return detail::Finalize(detail::BuildDualCase(bc, lim.umax, lim.vmax), bc);
}

inline Solution SolveCase4(const BoundaryConditions& bc, const Limits& lim) {
  RequireFeasible(bc, lim);
  return detail::Finalize(detail::BuildSpeedCase(bc, lim.vmin, false), bc);
}

inline Solution SolveCase5(const BoundaryConditions& bc, const Limits& lim) {
  RequireFeasible(bc, lim);
  return detail::Finalize(detail::BuildControlCase(bc, lim.umin), bc);
}

inline Solution SolveCase6(const BoundaryConditions& bc, const Limits& lim) {
  RequireFeasible(bc, lim);
  return detail::Finalize(detail::BuildDualCase(bc, lim.umin, lim.vmin), bc);
}

inline Solution SolveCase(const BoundaryConditions& bc, const Limits& lim, ConstraintCase c) {
  switch (c) {
    case ConstraintCase::kUnconstrained: RequireFeasible(bc, lim); return SolveUnconstrainedCase(bc);
    case ConstraintCase::kVmaxOnly: return SolveCase1(bc, lim);
    case ConstraintCase::kUmaxOnly: return SolveCase2(bc, lim);
    case ConstraintCase::kUmaxAndVmax: return SolveCase3(bc, lim);
    case ConstraintCase::kVminOnly: return SolveCase4(bc, lim);
    case ConstraintCase::kUminOnly: return SolveCase5(bc, lim);
    case ConstraintCase::kUminAndVmin: return SolveCase6(bc, lim);
  }
  throw Error(ErrorCode::kPrecondition, "unknown case");
}

/// Classifies once and builds the matching construction.
inline Solution Solve(const BoundaryConditions& bc, const Limits& lim) {
  return SolveCase(bc, lim, Classify(bc, lim));
}

}  // namespace ecotraj
