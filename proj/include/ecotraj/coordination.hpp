#pragma once

// FIFO coordination of vehicles crossing a signal-free intersection: each
// vehicle gets a merging time, solves its own energy-optimal transit, and the
// resulting schedule is checked for rear-end and lateral conflicts.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ecotraj/constrained.hpp"
#include "ecotraj/trajectory.hpp"

namespace ecotraj {

/// Speed-dependent minimum following distance: standstill + headway * v.
struct SafetyGap {
  double standstill_m = 5.0;
  double headway_s = 0.5;

  double At(double speed) const { return standstill_m + headway_s * speed; }
};

struct Arrival {
  int id = 0;
  std::string lane;
  double t0 = 0.0;
  double v0 = 0.0;
};

struct ScenarioConfig {
  double control_zone_length = 0.0;  // m
  double merging_zone_size = 0.0;    // m
  std::vector<std::string> lanes;
  std::vector<std::pair<std::string, std::string>> conflicts;
  Limits limits;
  SafetyGap gap;
  double conflict_separation = 0.1;  // s between conflicting occupancy intervals
  std::vector<Arrival> arrivals;

  bool HasLane(const std::string& lane) const {
    return std::find(lanes.begin(), lanes.end(), lane) != lanes.end();
  }

  bool Conflicting(const std::string& a, const std::string& b) const {
    for (const auto& [x, y] : conflicts) {
      if ((x == a && y == b) || (x == b && y == a)) return true;
    }
    return false;
  }

  void Validate() const {
    if (!(control_zone_length > 0.0)) {
      throw Error(ErrorCode::kDomain, "control zone length must be positive");
    }
    if (!(merging_zone_size > 0.0)) {
      throw Error(ErrorCode::kDomain, "merging zone size must be positive");
    }
    limits.Validate();
    if (!(limits.vmin > 0.0)) {
      throw Error(ErrorCode::kDomain, "scenarios need vmin > 0 to cross the merging zone");
    }
    if (!(gap.standstill_m >= 0.0) || !(gap.headway_s >= 0.0) ||
        !(conflict_separation >= 0.0)) {
      throw Error(ErrorCode::kDomain, "safety parameters must be non-negative");
    }
    for (const auto& [a, b] : conflicts) {
      if (!HasLane(a) || !HasLane(b)) {
        throw Error(ErrorCode::kDomain, "conflict names unknown lane " + (HasLane(a) ? b : a));
      }
    }
    std::set<int> ids;
    for (std::size_t k = 0; k < arrivals.size(); ++k) {
      const Arrival& a = arrivals[k];
      if (!ids.insert(a.id).second) {
        throw Error(ErrorCode::kDomain, "duplicate vehicle id " + std::to_string(a.id));
      }
      if (!HasLane(a.lane)) {
        throw Error(ErrorCode::kDomain,
                    "vehicle " + std::to_string(a.id) + " on unknown lane " + a.lane);
      }
      if (k > 0 && a.t0 < arrivals[k - 1].t0) {
        throw Error(ErrorCode::kDomain, "arrivals must be sorted by entry time");
      }
      if (!(a.t0 >= 0.0)) {
        throw Error(ErrorCode::kDomain, "vehicle " + std::to_string(a.id) + " enters before 0");
      }
      if (!(a.v0 >= limits.vmin && a.v0 <= limits.vmax) || !(a.v0 > 0.0)) {
        throw Error(ErrorCode::kDomain,
                    "vehicle " + std::to_string(a.id) + " entry speed outside [vmin, vmax]");
      }
    }
  }
};

struct VehiclePlan {
  int id = 0;
  std::string lane;
  BoundaryConditions bc;
  PiecewiseTrajectory traj;
  double t_f = 0.0;  // merging-zone exit
  double cost = 0.0;

  double exit_speed() const { return traj.Eval(bc.tm, Side::kLeft).speed; }

  // Along-lane state; constant speed outside the planned window.
  State StateAt(double t) const {
    if (t < bc.t0) return State{bc.p0 + bc.v0 * (t - bc.t0), bc.v0, 0.0};
    if (t > bc.tm) {
      const double v = exit_speed();
      return State{bc.pm + v * (t - bc.tm), v, 0.0};
    }
    return traj.Eval(t);
  }
};

struct RearEndViolation {
  int follower = 0;
  int leader = 0;
  double time = 0.0;  // first sample in violation
  double gap = 0.0;
  double required = 0.0;
};

struct LateralViolation {
  int first = 0;
  int second = 0;
  double overlap_start = 0.0;
  double overlap_end = 0.0;
};

/// Same-lane follower/leader pairs in plan order; reports the first
/// violating sample of each pair over the follower's [t0, t_f].
inline std::vector<RearEndViolation> CheckRearEnd(const std::vector<VehiclePlan>& plans,
                                                  const SafetyGap& gap,
                                                  double dt_sample = 1e-2) {
  std::vector<RearEndViolation> out;
  std::map<std::string, std::size_t> last_on_lane;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const VehiclePlan& follower = plans[i];
    const auto it = last_on_lane.find(follower.lane);
    if (it != last_on_lane.end()) {
      const VehiclePlan& leader = plans[it->second];
      const double t_begin = follower.bc.t0;
      const double t_end = follower.t_f;
      const auto samples =
          static_cast<std::size_t>(std::ceil((t_end - t_begin) / dt_sample - 1e-9));
      for (std::size_t k = 0; k <= samples; ++k) {
        const double t = std::min(t_begin + dt_sample * static_cast<double>(k), t_end);
        const State f = follower.StateAt(t);
        const double spacing = leader.StateAt(t).position - f.position;
        const double required = gap.At(f.speed);
        if (spacing < required - 1e-9) {
          out.push_back({follower.id, leader.id, t, spacing, required});
          break;
        }
      }
    }
    last_on_lane[follower.lane] = i;
  }
  return out;
}

/// Occupancy intervals [tm, t_f) of conflicting lanes must not intersect.
inline std::vector<LateralViolation> CheckLateral(const std::vector<VehiclePlan>& plans,
                                                  const ScenarioConfig& config) {
  std::vector<LateralViolation> out;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    for (std::size_t j = i + 1; j < plans.size(); ++j) {
      if (!config.Conflicting(plans[i].lane, plans[j].lane)) continue;
      const double lo = std::max(plans[i].bc.tm, plans[j].bc.tm);
      const double hi = std::min(plans[i].t_f, plans[j].t_f);
      if (lo < hi) out.push_back({plans[i].id, plans[j].id, lo, hi});
    }
  }
  return out;
}

/// Horizons [lo, hi] for which the distance is reachable from v0.
struct HorizonWindow {
  double lo = 0.0;
  double hi = kInf;
};

inline HorizonWindow FeasibleHorizonWindow(double v0, double distance, const Limits& lim) {
  auto env = [&](double T) { return ReachableEnvelope(BoundaryConditions{0.0, T, 0.0, distance, v0}, lim); };
  const double cruise = distance / v0;
  HorizonWindow w;
  double lo = 0.0, hi = cruise;
  for (int k = 0; k < 200 && hi - lo > 1e-12 * cruise; ++k) {
    const double mid = 0.5 * (lo + hi);
    (env(mid).max_distance >= distance ? hi : lo) = mid;
  }
  w.lo = hi;
  double top = cruise;
  while (env(top).min_distance <= distance) {
    top *= 2.0;
    if (top > 1e7) return w;
  }
  lo = cruise;
  hi = top;
  for (int k = 0; k < 200 && hi - lo > 1e-12 * top; ++k) {
    const double mid = 0.5 * (lo + hi);
    (env(mid).min_distance <= distance ? lo : hi) = mid;
  }
  w.hi = lo;
  return w;
}

struct ScheduleOptions {
  double push_step = 0.05;    // s added per rear-end retry
  double sample_dt = 1e-2;    // s, rear-end sampling during scheduling
};

namespace detail {

inline VehiclePlan PlanVehicle(const ScenarioConfig& config, const Arrival& a, double tm) {
  VehiclePlan plan;
  plan.id = a.id;
  plan.lane = a.lane;
  plan.bc = BoundaryConditions{a.t0, tm, 0.0, config.control_zone_length, a.v0};
  try {
    Solution s = Solve(plan.bc, config.limits);
    plan.traj = std::move(s.trajectory);
  } catch (const Error& e) {
    throw Error(e.code(), "vehicle " + std::to_string(a.id) + ": " + e.what());
  }
  plan.cost = Cost(plan.traj);
  plan.t_f = tm + config.merging_zone_size / plan.exit_speed();
  return plan;
}

}  // namespace detail

/// Sequential FIFO schedule: each vehicle's merging time is the latest of its
/// cruise arrival, its same-lane leader's clearance, and the end of every
/// earlier conflicting occupancy plus the separation. Rear-end conflicts push
/// the merging time later until the follower stays clear.
inline std::vector<VehiclePlan> Schedule(const ScenarioConfig& config,
                                         const ScheduleOptions& opt = {}) {
  config.Validate();
  std::vector<VehiclePlan> plans;
  std::map<std::string, std::size_t> last_on_lane;
  const double L = config.control_zone_length;
  for (const Arrival& a : config.arrivals) {
    double tm = a.t0 + L / a.v0;
    const auto lead = last_on_lane.find(a.lane);
    if (lead != last_on_lane.end()) {
      const VehiclePlan& k = plans[lead->second];
      const double v = k.exit_speed();
      tm = std::max(tm, k.bc.tm + config.gap.At(v) / v);
    }
    for (const VehiclePlan& other : plans) {
      if (config.Conflicting(a.lane, other.lane)) {
        tm = std::max(tm, other.t_f + config.conflict_separation);
      }
    }
    const HorizonWindow window = FeasibleHorizonWindow(a.v0, L, config.limits);
    tm = std::max(tm, a.t0 + window.lo);
    auto too_late = [&](double t) { return t - a.t0 > window.hi; };
    if (too_late(tm)) {
      throw Error(ErrorCode::kInfeasible,
                  "vehicle " + std::to_string(a.id) + ": required delay exceeds what vmin allows");
    }
    VehiclePlan plan = detail::PlanVehicle(config, a, tm);
    if (lead != last_on_lane.end()) {
      const VehiclePlan& k = plans[lead->second];
      while (!CheckRearEnd({k, plan}, config.gap, opt.sample_dt).empty()) {
        const double next = plan.bc.tm + opt.push_step;
        if (too_late(next)) break;
        plan = detail::PlanVehicle(config, a, next);
      }
    }
    last_on_lane[a.lane] = plans.size();
    plans.push_back(std::move(plan));
  }
  return plans;
}

inline std::vector<double> AssignMergingTimes(const ScenarioConfig& config) {
  std::vector<double> out;
  for (const VehiclePlan& p : Schedule(config)) out.push_back(p.bc.tm);
  return out;
}

struct SimulationReport {
  std::vector<VehiclePlan> plans;
  double total_cost = 0.0;
  std::map<ConstraintCase, int> case_counts;
  std::vector<RearEndViolation> rear_end;
  std::vector<LateralViolation> lateral;

  bool Safe() const { return rear_end.empty() && lateral.empty(); }
};

inline SimulationReport Run(const ScenarioConfig& config, double check_dt = 1e-2) {
  SimulationReport report;
  for (ConstraintCase c : kAllCases) report.case_counts[c] = 0;
  report.plans = Schedule(config);
  for (const VehiclePlan& p : report.plans) {
    report.total_cost += p.cost;
    ++report.case_counts[p.traj.constraint_case];
  }
  report.rear_end = CheckRearEnd(report.plans, config.gap, check_dt);
  report.lateral = CheckLateral(report.plans, config);
  return report;
}

// Four straight approaches; perpendicular approaches conflict.
inline ScenarioConfig FourWayTemplate() {
  ScenarioConfig c;
  c.control_zone_length = 200.0;
  c.merging_zone_size = 15.0;
  c.lanes = {"north", "east", "south", "west"};
  c.conflicts = {{"north", "east"}, {"north", "west"}, {"south", "east"}, {"south", "west"}};
  c.limits = Limits{2.0, 25.0, -3.0, 2.5};
  return c;
}

/// Reproducible random arrival stream on the four-way template. Same-lane
/// entries are at least `min_lane_spacing` seconds apart.
inline ScenarioConfig RandomScenario(std::uint64_t seed, std::size_t vehicles,
                                     double mean_interarrival = 4.0,
                                     double min_lane_spacing = 3.0) {
  ScenarioConfig c = FourWayTemplate();
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::map<std::string, double> lane_free;
  double t = 0.0;
  for (std::size_t k = 0; k < vehicles; ++k) {
    t += -mean_interarrival * std::log(1.0 - unit());
    const std::string& lane = c.lanes[static_cast<std::size_t>(unit() * 4.0) % 4];
    const double v0 = 10.0 + 8.0 * unit();
    auto it = lane_free.find(lane);
    if (it != lane_free.end()) t = std::max(t, it->second);
    lane_free[lane] = t + min_lane_spacing;
    c.arrivals.push_back({static_cast<int>(k + 1), lane, t, v0});
  }
  return c;
}

}  // namespace ecotraj
