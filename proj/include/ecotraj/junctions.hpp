#pragma once

// Junction times of the constrained constructions. Each formula is written
// once for a generic (control bound U, speed bound V) pair; the max side
// passes (umax, vmax) and the min side (umin, vmin). Results are absolute.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "ecotraj/trajectory.hpp"

namespace ecotraj {
namespace detail {

// Maps a local junction time into [0, T], rejecting real excursions.
inline double ClampIntoWindow(double tau, double T, const char* what) {
  if (!std::isfinite(tau) || tau < -kMinArcDuration || tau > T + kMinArcDuration) {
    throw Error(ErrorCode::kInconsistentCase,
                std::string(what) + " junction " + std::to_string(tau) +
                    " s outside horizon [0, " + std::to_string(T) + "] s");
  }
  return std::clamp(tau, 0.0, T);
}

// Local time at which the speed reaches V with zero control, then stays.
inline double SpeedJunctionLocal(const BoundaryConditions& bc, double V) {
  const double T = bc.horizon();
  const double L = bc.distance();
  const double gap = bc.v0 - V;
  if (std::abs(gap) <= 1e-12 * std::max(1.0, std::abs(V))) {
    // Already at the bound: only an immediate cruise can close the distance.
    if (std::abs(L - V * T) <= 1e-9 * std::max(1.0, L)) return 0.0;
    throw Error(ErrorCode::kInconsistentCase, "entry speed equals the speed bound");
  }
  return ClampIntoWindow(3.0 * (L - V * T) / gap, T, "speed");
}

// Local time at which a saturated-control arc from t0 hands over to the
// free-end arc.
inline double ControlJunctionLocal(const BoundaryConditions& bc, double U) {
  const double T = bc.horizon();
  const double L = bc.distance();
  const double radicand = (3.0 * T * T * U + 6.0 * T * bc.v0 - 6.0 * L) / U;
  const double scale = (3.0 * T * T * std::abs(U) + 6.0 * T * bc.v0 + 6.0 * L) / std::abs(U);
  if (radicand < -1e-12 * scale) {
    throw Error(ErrorCode::kInconsistentCase,
                "negative radicand " + std::to_string(radicand) + " in control junction");
  }
  return ClampIntoWindow(T - std::sqrt(std::max(radicand, 0.0)), T, "control");
}

struct JunctionPair {
  double tau_c = 0.0;
  double tau_s = 0.0;
};

// Control-then-free-then-speed construction. The middle arc of length w runs
// from control U down to zero control, ending at speed V. Speed gain and
// distance closure give tau_c = D - w/2 with D = (V - v0)/U and
//   w^2 = 24 (V T - L)/U - 12 D^2.
inline JunctionPair DualJunctionsLocal(const BoundaryConditions& bc, double U, double V) {
  const double T = bc.horizon();
  const double L = bc.distance();
  const double D = (V - bc.v0) / U;
  const double first = 24.0 * (V * T - L) / U;
  const double second = 12.0 * D * D;
  double w2 = first - second;
  if (w2 < 0.0) {
    if (w2 < -1e-12 * (std::abs(first) + second)) {
      throw Error(ErrorCode::kInfeasible,
                  "no real junction pair: distance beyond the saturated profile");
    }
    w2 = 0.0;
  }
  const double w = std::sqrt(w2);
  JunctionPair out;
  out.tau_c = ClampIntoWindow(D - w / 2.0, T, "control");
  out.tau_s = ClampIntoWindow(D + w / 2.0, T, "speed");
  if (out.tau_s < out.tau_c) {
    throw Error(ErrorCode::kInconsistentCase, "junctions out of order");
  }
  return out;
}

}  // namespace detail

inline double JunctionVmax(const BoundaryConditions& bc, const Limits& lim) {
  return bc.t0 + detail::SpeedJunctionLocal(bc, lim.vmax);
}

inline double JunctionVmin(const BoundaryConditions& bc, const Limits& lim) {
  return bc.t0 + detail::SpeedJunctionLocal(bc, lim.vmin);
}

inline double JunctionUmax(const BoundaryConditions& bc, const Limits& lim) {
  return bc.t0 + detail::ControlJunctionLocal(bc, lim.umax);
}

inline double JunctionUmin(const BoundaryConditions& bc, const Limits& lim) {
  return bc.t0 + detail::ControlJunctionLocal(bc, lim.umin);
}

/// (tau_c, tau_s) for the umax + vmax construction.
inline std::pair<double, double> JunctionsCase3(const BoundaryConditions& bc,
                                                const Limits& lim) {
  const detail::JunctionPair j = detail::DualJunctionsLocal(bc, lim.umax, lim.vmax);
  return {bc.t0 + j.tau_c, bc.t0 + j.tau_s};
}

/// (tau_c, tau_s) for the umin + vmin construction.
inline std::pair<double, double> JunctionsCase6(const BoundaryConditions& bc,
                                                const Limits& lim) {
  const detail::JunctionPair j = detail::DualJunctionsLocal(bc, lim.umin, lim.vmin);
  return {bc.t0 + j.tau_c, bc.t0 + j.tau_s};
}

}  // namespace ecotraj
