#pragma once

// A-priori selection of the active-constraint case from closed-form
// activation conditions, without solving any intermediate case.

#include <cmath>
#include <string>

#include "ecotraj/junctions.hpp"
#include "ecotraj/trajectory.hpp"
#include "ecotraj/unconstrained.hpp"

namespace ecotraj {

enum class ExclusionSide { kMaxSide, kMinSide, kNeither };

inline const char* ToString(ExclusionSide s) {
  switch (s) {
    case ExclusionSide::kMaxSide: return "MaxSide";
    case ExclusionSide::kMinSide: return "MinSide";
    case ExclusionSide::kNeither: return "Neither";
  }
  return "unknown";
}

/// Which bound family can become active at all.
inline ExclusionSide GetExclusionSide(const BoundaryConditions& bc) {
  switch (ClassifySlope(bc)) {
    case Slope::kDecreasing: return ExclusionSide::kMaxSide;
    case Slope::kIncreasing: return ExclusionSide::kMinSide;
    case Slope::kFlat: break;
  }
  return ExclusionSide::kNeither;
}

/// Merging times (absolute) at which each bound starts to bind. The speed
/// bounds bind for tm at or below / at or above their threshold. For umax the
/// bound binds for tm at or below the threshold; for umin the printed lower
/// root is reported, but activation is decided by the sign test in UminActive.
struct ActivationThresholds {
  double tm_vmax = kInf;
  double tm_umax = kInf;
  double tm_vmin = kInf;
  double tm_umin = kInf;
};

namespace detail {

// Positive root (-3 v0 + sqrt(9 v0^2 + 12 U L)) / (2 U); +inf if complex.
inline double ControlThresholdHorizon(double v0, double L, double U) {
  if (std::isinf(U)) return U > 0 ? 0.0 : kInf;
  const double disc = 9.0 * v0 * v0 + 12.0 * U * L;
  if (disc < 0.0) return kInf;
  return (-3.0 * v0 + std::sqrt(disc)) / (2.0 * U);
}

// U T^2 + 3 v0 T - 3 L; its sign says whether the unconstrained initial
// control reaches U (non-positive for U > 0, non-negative for U < 0).
inline double ControlActivationMargin(double v0, double T, double L, double U) {
  return U * T * T + 3.0 * v0 * T - 3.0 * L;
}

}  // namespace detail

inline ActivationThresholds GetActivationThresholds(const BoundaryConditions& bc,
                                                    const Limits& lim) {
  const double L = bc.distance();
  ActivationThresholds th;
  th.tm_vmax = bc.t0 + 3.0 * L / (bc.v0 + 2.0 * lim.vmax);
  th.tm_vmin = bc.t0 + 3.0 * L / (bc.v0 + 2.0 * lim.vmin);
  th.tm_umax = bc.t0 + detail::ControlThresholdHorizon(bc.v0, L, lim.umax);
  th.tm_umin = bc.t0 + detail::ControlThresholdHorizon(bc.v0, L, lim.umin);
  return th;
}

inline bool VmaxActive(const BoundaryConditions& bc, const Limits& lim) {
  if (GetExclusionSide(bc) != ExclusionSide::kMaxSide) return false;
  return bc.horizon() <= 3.0 * bc.distance() / (bc.v0 + 2.0 * lim.vmax);
}

inline bool UmaxActive(const BoundaryConditions& bc, const Limits& lim) {
  if (GetExclusionSide(bc) != ExclusionSide::kMaxSide) return false;
  return detail::ControlActivationMargin(bc.v0, bc.horizon(), bc.distance(), lim.umax) <= 0.0;
}

inline bool VminActive(const BoundaryConditions& bc, const Limits& lim) {
  if (GetExclusionSide(bc) != ExclusionSide::kMinSide) return false;
  return bc.horizon() >= 3.0 * bc.distance() / (bc.v0 + 2.0 * lim.vmin);
}

inline bool UminActive(const BoundaryConditions& bc, const Limits& lim) {
  if (GetExclusionSide(bc) != ExclusionSide::kMinSide) return false;
  return detail::ControlActivationMargin(bc.v0, bc.horizon(), bc.distance(), lim.umin) >= 0.0;
}

namespace detail {

// Does the speed-bound construction, ending its free arc at tau_s (local),
// start with a control at or beyond U?
inline bool CoupledControlGivenSpeed(const BoundaryConditions& bc, double U, double V,
                                     double tau_s_local) {
  if (tau_s_local <= 0.0) return false;
  const double reached = bc.distance() - V * (bc.horizon() - tau_s_local);
  const double margin = ControlActivationMargin(bc.v0, tau_s_local, reached, U);
  return U > 0.0 ? margin <= 0.0 : margin >= 0.0;
}

// Does the free arc after the control arc push the speed to or past V?
inline bool CoupledSpeedGivenControl(const BoundaryConditions& bc, double U, double V,
                                     double tau_c_local) {
  const double v_c = bc.v0 + U * tau_c_local;
  return bc.horizon() >= tau_c_local + 2.0 * (V - v_c) / U;
}

}  // namespace detail

inline bool CoupledUmaxGivenVmax(const BoundaryConditions& bc, const Limits& lim,
                                 double tau_s) {
  if (!VmaxActive(bc, lim)) {
    throw Error(ErrorCode::kPrecondition, "vmax is not active on this instance");
  }
  return detail::CoupledControlGivenSpeed(bc, lim.umax, lim.vmax, tau_s - bc.t0);
}

inline bool CoupledVmaxGivenUmax(const BoundaryConditions& bc, const Limits& lim,
                                 double tau_c) {
  if (!UmaxActive(bc, lim)) {
    throw Error(ErrorCode::kPrecondition, "umax is not active on this instance");
  }
  return detail::CoupledSpeedGivenControl(bc, lim.umax, lim.vmax, tau_c - bc.t0);
}

inline bool CoupledUminGivenVmin(const BoundaryConditions& bc, const Limits& lim,
                                 double tau_s) {
  if (!VminActive(bc, lim)) {
    throw Error(ErrorCode::kPrecondition, "vmin is not active on this instance");
  }
  return detail::CoupledControlGivenSpeed(bc, lim.umin, lim.vmin, tau_s - bc.t0);
}

inline bool CoupledVminGivenUmin(const BoundaryConditions& bc, const Limits& lim,
                                 double tau_c) {
  if (!UminActive(bc, lim)) {
    throw Error(ErrorCode::kPrecondition, "umin is not active on this instance");
  }
  return detail::CoupledSpeedGivenControl(bc, lim.umin, lim.vmin, tau_c - bc.t0);
}

/// Single-pass case selection. Throws kInfeasible outside the reachable envelope.
inline ConstraintCase Classify(const BoundaryConditions& bc, const Limits& lim) {
  RequireFeasible(bc, lim);
  const ExclusionSide side = GetExclusionSide(bc);
  if (side == ExclusionSide::kNeither) return ConstraintCase::kUnconstrained;
  const bool max_side = side == ExclusionSide::kMaxSide;
  const double U = max_side ? lim.umax : lim.umin;
  const double V = max_side ? lim.vmax : lim.vmin;
  const bool speed_active = max_side ? VmaxActive(bc, lim) : VminActive(bc, lim);
  const bool control_active = max_side ? UmaxActive(bc, lim) : UminActive(bc, lim);
  const ConstraintCase speed_only =
      max_side ? ConstraintCase::kVmaxOnly : ConstraintCase::kVminOnly;
  const ConstraintCase control_only =
      max_side ? ConstraintCase::kUmaxOnly : ConstraintCase::kUminOnly;
  const ConstraintCase both =
      max_side ? ConstraintCase::kUmaxAndVmax : ConstraintCase::kUminAndVmin;

  if (speed_active) {
    const double tau_s = detail::SpeedJunctionLocal(bc, V);
    return detail::CoupledControlGivenSpeed(bc, U, V, tau_s) ? both : speed_only;
  }
  if (control_active) {
    const double tau_c = detail::ControlJunctionLocal(bc, U);
    return detail::CoupledSpeedGivenControl(bc, U, V, tau_c) ? both : control_only;
  }
  return ConstraintCase::kUnconstrained;
}

}  // namespace ecotraj
