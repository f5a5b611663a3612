#pragma once

// Core value types for fixed-horizon energy-optimal double-integrator
// trajectories: boundary data, box limits, polynomial arcs, piecewise
// trajectories and the reconstructed costate/multiplier profile.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ecotraj {

enum class ErrorCode {
  kDomain,
  kInfeasible,
  kInconsistentCase,
  kNonConverged,
  kEmptyFeasibleSet,
  kPrecondition,
  kParse,
};

inline const char* ToString(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kInconsistentCase: return "inconsistent case";
    case ErrorCode::kNonConverged: return "not converged";
    case ErrorCode::kEmptyFeasibleSet: return "empty feasible set";
    case ErrorCode::kPrecondition: return "precondition violated";
    case ErrorCode::kParse: return "parse error";
  }
  return "unknown error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ToString(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Position/speed continuity tolerance at junctions of analytic output.
inline constexpr double kContinuityTol = 1e-9;
// Arcs shorter than this are dropped when a construction degenerates.
inline constexpr double kMinArcDuration = 1e-9;

/// Entry/exit data of one vehicle's transit of the control zone.
struct BoundaryConditions {
  double t0 = 0.0;  // entry time [s]
  double tm = 0.0;  // merging-zone entry time [s]
  double p0 = 0.0;  // entry position [m]
  double pm = 0.0;  // merging-zone entry position [m]
  double v0 = 0.0;  // entry speed [m/s]

  double horizon() const { return tm - t0; }
  double distance() const { return pm - p0; }

  void Validate() const {
    if (!(t0 >= 0.0) || !(tm > t0) || !std::isfinite(tm)) {
      throw Error(ErrorCode::kDomain, "boundary conditions need tm > t0 >= 0");
    }
    if (!(pm > p0) || !std::isfinite(pm) || !std::isfinite(p0)) {
      throw Error(ErrorCode::kDomain, "boundary conditions need pm > p0");
    }
    if (!(v0 > 0.0) || !std::isfinite(v0)) {
      throw Error(ErrorCode::kDomain, "boundary conditions need v0 > 0");
    }
  }
};

/// Speed and acceleration box. Infinite bounds mean "not imposed".
struct Limits {
  double vmin = 0.0;
  double vmax = kInf;
  double umin = -kInf;
  double umax = kInf;

  static Limits Unbounded() { return Limits{}; }

  void Validate() const {
    if (!(vmin >= 0.0) || !(vmax > vmin)) {
      throw Error(ErrorCode::kDomain, "limits need 0 <= vmin < vmax");
    }
    if (!(umin < 0.0) || !(umax > 0.0)) {
      throw Error(ErrorCode::kDomain, "limits need umin < 0 < umax");
    }
  }
};

enum class ArcKind { kUnconstrained, kControlMax, kControlMin, kSpeedMax, kSpeedMin };

inline const char* ToString(ArcKind kind) {
  switch (kind) {
    case ArcKind::kUnconstrained: return "unconstrained";
    case ArcKind::kControlMax: return "control_max";
    case ArcKind::kControlMin: return "control_min";
    case ArcKind::kSpeedMax: return "speed_max";
    case ArcKind::kSpeedMin: return "speed_min";
  }
  return "unknown";
}

inline bool ParseArcKind(std::string_view name, ArcKind* kind) {
  for (ArcKind k : {ArcKind::kUnconstrained, ArcKind::kControlMax, ArcKind::kControlMin,
                    ArcKind::kSpeedMax, ArcKind::kSpeedMin}) {
    if (name == ToString(k)) {
      *kind = k;
      return true;
    }
  }
  return false;
}

/// Final constraint-activation case of a solved instance.
enum class ConstraintCase {
  kUnconstrained,
  kVmaxOnly,
  kUmaxOnly,
  kUmaxAndVmax,
  kVminOnly,
  kUminOnly,
  kUminAndVmin,
};

inline constexpr ConstraintCase kAllCases[] = {
    ConstraintCase::kUnconstrained, ConstraintCase::kVmaxOnly,
    ConstraintCase::kUmaxOnly,      ConstraintCase::kUmaxAndVmax,
    ConstraintCase::kVminOnly,      ConstraintCase::kUminOnly,
    ConstraintCase::kUminAndVmin,
};

inline const char* ToString(ConstraintCase c) {
  switch (c) {
    case ConstraintCase::kUnconstrained: return "Unconstrained";
    case ConstraintCase::kVmaxOnly: return "VmaxOnly";
    case ConstraintCase::kUmaxOnly: return "UmaxOnly";
    case ConstraintCase::kUmaxAndVmax: return "UmaxAndVmax";
    case ConstraintCase::kVminOnly: return "VminOnly";
    case ConstraintCase::kUminOnly: return "UminOnly";
    case ConstraintCase::kUminAndVmin: return "UminAndVmin";
  }
  return "unknown";
}

inline bool IsMaxSide(ConstraintCase c) {
  return c == ConstraintCase::kVmaxOnly || c == ConstraintCase::kUmaxOnly ||
         c == ConstraintCase::kUmaxAndVmax;
}

inline bool IsMinSide(ConstraintCase c) {
  return c == ConstraintCase::kVminOnly || c == ConstraintCase::kUminOnly ||
         c == ConstraintCase::kUminAndVmin;
}

struct State {
  double position = 0.0;
  double speed = 0.0;
  double accel = 0.0;
};

/// One arc: u = a t + b, v = a t^2/2 + b t + c, p = a t^3/6 + b t^2/2 + c t + d
/// with t in absolute time over [t_start, t_end].
struct PolyArc {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  ArcKind kind = ArcKind::kUnconstrained;

  double duration() const { return t_end - t_start; }

  // No window check; callers that need it go through Eval().
  State At(double t) const {
    return State{((a * t / 6.0 + b / 2.0) * t + c) * t + d, (a * t / 2.0 + b) * t + c,
                 a * t + b};
  }
};

inline State Eval(const PolyArc& arc, double t) {
  const double slack = 1e-12 * std::max(1.0, std::abs(t));
  if (!(t >= arc.t_start - slack && t <= arc.t_end + slack)) {
    throw Error(ErrorCode::kDomain, "time " + std::to_string(t) + " outside arc window [" +
                                        std::to_string(arc.t_start) + ", " +
                                        std::to_string(arc.t_end) + "]");
  }
  return arc.At(t);
}

/// Builds the arc with control slope `a` and offset `b` that passes through
/// (position, speed) at time `t`.
inline PolyArc ArcThrough(double a, double b, double t, double position, double speed,
                          double t_start, double t_end, ArcKind kind) {
  PolyArc arc{a, b, 0.0, 0.0, t_start, t_end, kind};
  arc.c = speed - (a * t / 2.0 + b) * t;
  arc.d = position - ((a * t / 6.0 + b / 2.0) * t + arc.c) * t;
  return arc;
}

// Integral of u^2/2 over one arc; exact because u is affine.
inline double ArcCost(const PolyArc& arc) {
  const double u1 = arc.a * arc.t_start + arc.b;
  const double u2 = arc.a * arc.t_end + arc.b;
  return arc.duration() / 6.0 * (u1 * u1 + u1 * u2 + u2 * u2);
}

enum class Side { kLeft, kRight };

struct PiecewiseTrajectory {
  std::vector<PolyArc> arcs;
  std::vector<double> junctions;
  ConstraintCase constraint_case = ConstraintCase::kUnconstrained;

  double t_start() const { return arcs.front().t_start; }
  double t_end() const { return arcs.back().t_end; }

  // Index of the arc owning t; at a junction `side` picks the left or right arc.
  std::size_t ArcIndex(double t, Side side = Side::kRight) const {
    for (std::size_t i = 0; i + 1 < arcs.size(); ++i) {
      const double jt = arcs[i].t_end;
      if (t < jt || (t == jt && side == Side::kLeft)) return i;
    }
    return arcs.size() - 1;
  }

  State Eval(double t, Side side = Side::kRight) const {
    if (arcs.empty()) throw Error(ErrorCode::kDomain, "empty trajectory");
    return ecotraj::Eval(arcs[ArcIndex(t, side)], t);
  }

  /// Checks contiguity, the arc/junction count relation, and state continuity.
  bool IsWellFormed(double tol = kContinuityTol) const {
    if (arcs.empty() || junctions.size() + 1 != arcs.size()) return false;
    for (std::size_t i = 0; i < arcs.size(); ++i) {
      if (!(arcs[i].t_end > arcs[i].t_start)) return false;
      if (i + 1 == arcs.size()) break;
      if (arcs[i].t_end != arcs[i + 1].t_start || arcs[i].t_end != junctions[i]) return false;
      const State l = arcs[i].At(junctions[i]);
      const State r = arcs[i + 1].At(junctions[i]);
      if (std::abs(l.position - r.position) > tol * std::max(1.0, std::abs(l.position)) ||
          std::abs(l.speed - r.speed) > tol * std::max(1.0, std::abs(l.speed))) {
        return false;
      }
    }
    return true;
  }
};

/// Energy functional: sum over arcs of the integral of u^2/2.
inline double Cost(const PiecewiseTrajectory& traj) {
  double total = 0.0;
  for (const PolyArc& arc : traj.arcs) total += ArcCost(arc);
  return total;
}

struct Costates {
  double lambda_p = 0.0;
  double lambda_v = 0.0;
  double mu_a = 0.0;
  double mu_b = 0.0;
  double eta_c = 0.0;
  double eta_d = 0.0;
};

// Costates and multipliers on one arc. lambda_p and the state multipliers are
// constant per arc; lambda_v and the control multipliers are affine in t.
struct CostateSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  double lambda_p = 0.0;
  double lambda_v0 = 0.0, lambda_v1 = 0.0;
  double mu_a0 = 0.0, mu_a1 = 0.0;
  double mu_b0 = 0.0, mu_b1 = 0.0;
  double eta_c = 0.0;
  double eta_d = 0.0;

  Costates At(double t) const {
    return Costates{lambda_p,         lambda_v0 + lambda_v1 * t, mu_a0 + mu_a1 * t,
                    mu_b0 + mu_b1 * t, eta_c,                     eta_d};
  }
};

/// Reconstructed adjoint solution, one segment per trajectory arc.
struct CostateProfile {
  std::vector<CostateSegment> segments;
  // Multiplier of the jump condition at entry of a speed-constrained arc.
  double pi_jump = 0.0;

  Costates At(double t, Side side = Side::kRight) const {
    if (segments.empty()) throw Error(ErrorCode::kDomain, "empty costate profile");
    for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
      const double jt = segments[i].t_end;
      if (t < jt || (t == jt && side == Side::kLeft)) return segments[i].At(t);
    }
    return segments.back().At(t);
  }

  std::vector<double> SampleLambdaV(const std::vector<double>& times) const {
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(At(t).lambda_v);
    return out;
  }
};

/// Adjoined Hamiltonian at time t (one-sided at junctions).
inline double Hamiltonian(const PiecewiseTrajectory& traj, const CostateProfile& profile,
                          const Limits& lim, double t, Side side = Side::kRight) {
  const State x = traj.Eval(t, side);
  const Costates c = profile.At(t, side);
  double h = 0.5 * x.accel * x.accel + c.lambda_p * x.speed + c.lambda_v * x.accel;
  // Zero multipliers on unimposed (infinite) bounds contribute nothing.
  if (c.mu_a != 0.0) h += c.mu_a * (x.accel - lim.umax);
  if (c.mu_b != 0.0) h += c.mu_b * (lim.umin - x.accel);
  if (c.eta_c != 0.0) h += c.eta_c * (x.speed - lim.vmax);
  if (c.eta_d != 0.0) h += c.eta_d * (lim.vmin - x.speed);
  return h;
}

struct Envelope {
  double min_distance = 0.0;
  double max_distance = 0.0;

  bool Contains(double distance) const {
    const double slack = 1e-12 * std::max(1.0, std::abs(distance));
    return distance >= min_distance - slack && distance <= max_distance + slack;
  }
};

namespace detail {

// Distance covered by saturating `accel` toward `bound`, then cruising at it.
inline double BangCruiseDistance(double v0, double horizon, double accel, double bound) {
  if ((accel > 0.0 && v0 >= bound) || (accel < 0.0 && v0 <= bound)) return bound * horizon;
  if (std::isinf(accel)) return bound * horizon;
  const double t_sat = std::isinf(bound) ? horizon : std::min((bound - v0) / accel, horizon);
  const double v_sat = v0 + accel * t_sat;
  return v0 * t_sat + 0.5 * accel * t_sat * t_sat + v_sat * (horizon - t_sat);
}

}  // namespace detail

/// Range of distances reachable over the horizon under the box limits.
inline Envelope ReachableEnvelope(const BoundaryConditions& bc, const Limits& lim) {
  const double horizon = bc.horizon();
  return Envelope{detail::BangCruiseDistance(bc.v0, horizon, lim.umin, lim.vmin),
                  detail::BangCruiseDistance(bc.v0, horizon, lim.umax, lim.vmax)};
}

inline bool IsFeasible(const BoundaryConditions& bc, const Limits& lim) {
  if (bc.v0 < lim.vmin || bc.v0 > lim.vmax) return false;
  return ReachableEnvelope(bc, lim).Contains(bc.distance());
}

// Throws kInfeasible with a diagnostic when the instance cannot be solved.
inline void RequireFeasible(const BoundaryConditions& bc, const Limits& lim) {
  bc.Validate();
  lim.Validate();
  if (bc.v0 < lim.vmin || bc.v0 > lim.vmax) {
    throw Error(ErrorCode::kInfeasible, "entry speed outside [vmin, vmax]");
  }
  const Envelope env = ReachableEnvelope(bc, lim);
  if (!env.Contains(bc.distance())) {
    throw Error(ErrorCode::kInfeasible,
                "distance " + std::to_string(bc.distance()) + " m outside reachable [" +
                    std::to_string(env.min_distance) + ", " +
                    std::to_string(env.max_distance) + "] m");
  }
}

}  // namespace ecotraj
