#pragma once

// Sampled check of the first-order optimality system for a solved trajectory.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ecotraj/trajectory.hpp"

namespace ecotraj {

struct CheckResult {
  std::string name;
  bool passed = true;
  double worst = 0.0;  // largest violation seen
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool Passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.passed; });
  }

  std::vector<std::string> Failures() const {
    std::vector<std::string> out;
    for (const CheckResult& c : checks) {
      if (!c.passed) out.push_back(c.name + ": " + c.detail);
    }
    return out;
  }
};

struct KktTolerances {
  double stationarity = 1e-6;
  double slackness = 1e-6;
  double sign = 1e-9;
  double terminal = 1e-9;
  double hamiltonian = 1e-6;
  std::size_t samples_per_arc = 101;
};

namespace detail {

inline void Record(CheckResult& check, double violation, double tol, const std::string& where) {
  if (violation > check.worst) check.worst = violation;
  if (violation > tol && check.passed) {
    check.passed = false;
    check.detail = "violation " + std::to_string(violation) + " at " + where;
  }
}

inline double BoundProduct(double multiplier, double gap) {
  if (multiplier == 0.0) return 0.0;
  if (!std::isfinite(gap)) return kInf;
  return std::abs(multiplier * gap);
}

}  // namespace detail

/// Runs five checks: stationarity (with the adjoint equations), complementary
/// slackness with primal feasibility, multiplier signs, the free terminal speed
/// transversality, and Hamiltonian continuity across junctions.
inline ValidationReport ValidateKkt(const PiecewiseTrajectory& traj, const CostateProfile& profile,
                                    const BoundaryConditions& bc, const Limits& lim,
                                    const KktTolerances& tol = {}) {
  CheckResult stationarity{"stationarity", true, 0.0, ""};
  CheckResult slackness{"complementary_slackness", true, 0.0, ""};
  CheckResult signs{"multiplier_sign", true, 0.0, ""};
  CheckResult terminal{"terminal_costate", true, 0.0, ""};
  CheckResult hamiltonian{"hamiltonian_continuity", true, 0.0, ""};
  ValidationReport report;

  const bool aligned = [&] {
    if (traj.arcs.empty() || profile.segments.size() != traj.arcs.size()) return false;
    if (std::abs(traj.t_start() - bc.t0) > kContinuityTol ||
        std::abs(traj.t_end() - bc.tm) > kContinuityTol) {
      return false;
    }
    for (std::size_t i = 0; i < traj.arcs.size(); ++i) {
      if (std::abs(profile.segments[i].t_start - traj.arcs[i].t_start) > kContinuityTol ||
          std::abs(profile.segments[i].t_end - traj.arcs[i].t_end) > kContinuityTol) {
        return false;
      }
    }
    return true;
  }();
  if (!aligned) {
    for (CheckResult* c : {&stationarity, &slackness, &signs, &terminal, &hamiltonian}) {
      c->passed = false;
      c->detail = "costate segments do not match trajectory arcs";
      report.checks.push_back(*c);
    }
    return report;
  }

  double lambda_scale = 1.0;
  for (const CostateSegment& s : profile.segments) {
    lambda_scale = std::max({lambda_scale, std::abs(s.lambda_v0 + s.lambda_v1 * s.t_start),
                             std::abs(s.lambda_v0 + s.lambda_v1 * s.t_end)});
  }

  const double lambda_p0 = profile.segments.front().lambda_p;
  for (std::size_t i = 0; i < traj.arcs.size(); ++i) {
    const PolyArc& arc = traj.arcs[i];
    const CostateSegment& seg = profile.segments[i];
    const std::string where_arc = "arc " + std::to_string(i);

    // Adjoint equations: lambda_p constant, d lambda_v/dt = -lambda_p - eta_c + eta_d.
    detail::Record(stationarity, std::abs(seg.lambda_p - lambda_p0), tol.stationarity,
                   where_arc + " (lambda_p jump)");
    detail::Record(stationarity,
                   std::abs(seg.lambda_v1 + seg.lambda_p + seg.eta_c - seg.eta_d),
                   tol.stationarity, where_arc + " (adjoint)");

    const std::size_t n = std::max<std::size_t>(tol.samples_per_arc, 2);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = arc.t_start + arc.duration() * static_cast<double>(k) /
                                         static_cast<double>(n - 1);
      const State x = arc.At(t);
      const Costates c = seg.At(t);
      const std::string where = "t=" + std::to_string(t);

      detail::Record(stationarity, std::abs(x.accel + c.lambda_v + c.mu_a - c.mu_b),
                     tol.stationarity, where);

      detail::Record(slackness, detail::BoundProduct(c.mu_a, x.accel - lim.umax),
                     tol.slackness, where + " (umax)");
      detail::Record(slackness, detail::BoundProduct(c.mu_b, lim.umin - x.accel),
                     tol.slackness, where + " (umin)");
      detail::Record(slackness, detail::BoundProduct(c.eta_c, x.speed - lim.vmax),
                     tol.slackness, where + " (vmax)");
      detail::Record(slackness, detail::BoundProduct(c.eta_d, lim.vmin - x.speed),
                     tol.slackness, where + " (vmin)");
      detail::Record(slackness, std::max(0.0, x.accel - lim.umax), tol.slackness,
                     where + " (u above umax)");
      detail::Record(slackness, std::max(0.0, lim.umin - x.accel), tol.slackness,
                     where + " (u below umin)");
      detail::Record(slackness, std::max(0.0, x.speed - lim.vmax), tol.slackness,
                     where + " (v above vmax)");
      detail::Record(slackness, std::max(0.0, lim.vmin - x.speed), tol.slackness,
                     where + " (v below vmin)");

      const double most_negative = std::min({c.mu_a, c.mu_b, c.eta_c, c.eta_d, 0.0});
      detail::Record(signs, -most_negative, tol.sign * lambda_scale, where);
    }
  }

  const double lambda_v_end = profile.segments.back().At(bc.tm).lambda_v;
  detail::Record(terminal, std::abs(lambda_v_end), tol.terminal * lambda_scale, "tm");

  for (double tj : traj.junctions) {
    const double jump = std::abs(Hamiltonian(traj, profile, lim, tj, Side::kRight) -
                                 Hamiltonian(traj, profile, lim, tj, Side::kLeft));
    detail::Record(hamiltonian, jump, tol.hamiltonian, "junction " + std::to_string(tj));
  }

  report.checks = {stationarity, slackness, signs, terminal, hamiltonian};
  return report;
}

}  // namespace ecotraj
