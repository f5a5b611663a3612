#pragma once

// Closed-form energy-optimal arc with free terminal speed.

#include <cmath>

#include "ecotraj/trajectory.hpp"

namespace ecotraj {

enum class Slope { kDecreasing, kIncreasing, kFlat };

inline const char* ToString(Slope s) {
  switch (s) {
    case Slope::kDecreasing: return "Decreasing";
    case Slope::kIncreasing: return "Increasing";
    case Slope::kFlat: return "Flat";
  }
  return "unknown";
}

namespace detail {

// Relative band within which v0*T == L counts as an exact cruise.
inline constexpr double kFlatTol = 1e-12;

inline bool IsCruise(const BoundaryConditions& bc) {
  const double L = bc.distance();
  return std::abs(bc.v0 * bc.horizon() - L) <= kFlatTol * L;
}

// Re-expresses a polynomial written in local time s = t - t0 (positions
// relative to p0) in absolute time.
inline PolyArc ToAbsolute(const PolyArc& local, double t0, double p0) {
  PolyArc out = local;
  const double a = local.a, b = local.b, c = local.c, d = local.d;
  out.a = a;
  out.b = b - a * t0;
  out.c = c - b * t0 + a * t0 * t0 / 2.0;
  out.d = d - c * t0 + b * t0 * t0 / 2.0 - a * t0 * t0 * t0 / 6.0 + p0;
  out.t_start = local.t_start + t0;
  out.t_end = local.t_end + t0;
  return out;
}

}  // namespace detail

inline PolyArc SolveUnconstrained(const BoundaryConditions& bc) {
  bc.Validate();
  const double T = bc.horizon();
  const double L = bc.distance();
  PolyArc local{0.0, 0.0, bc.v0, 0.0, 0.0, T, ArcKind::kUnconstrained};
  if (!detail::IsCruise(bc)) {
    local.a = 3.0 * (bc.v0 * T - L) / (T * T * T);
    local.b = -local.a * T;
  }
  PolyArc arc = detail::ToAbsolute(local, bc.t0, bc.p0);
  // Pin the window to the exact inputs so u(tm) = a*tm + b is evaluated there.
  arc.t_start = bc.t0;
  arc.t_end = bc.tm;
  arc.b = -arc.a * bc.tm;
  return arc;
}

inline Slope ClassifySlope(const PolyArc& /*arc*/, const BoundaryConditions& bc) {
  if (detail::IsCruise(bc)) return Slope::kFlat;
  return bc.v0 * bc.horizon() < bc.distance() ? Slope::kDecreasing : Slope::kIncreasing;
}

inline Slope ClassifySlope(const BoundaryConditions& bc) {
  return ClassifySlope(PolyArc{}, bc);
}

// Terminal speed of the unconstrained arc; its peak (or trough) over the horizon.
inline double UnconstrainedTerminalSpeed(const BoundaryConditions& bc) {
  return 1.5 * bc.distance() / bc.horizon() - 0.5 * bc.v0;
}

}  // namespace ecotraj
