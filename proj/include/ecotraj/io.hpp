#pragma once

// Text formats: trajectory CSV, scenario files, simulation summaries.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ecotraj/coordination.hpp"
#include "ecotraj/trajectory.hpp"

namespace ecotraj {

// 17 significant digits: enough to round-trip any double.
inline std::string FormatDouble(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
  return buf;
}

inline constexpr const char* kTrajectoryCsvHeader = "t_s,p_m,v_mps,u_mps2,arc_kind";

/// Samples every `resolution` seconds. Each junction is written twice, once
/// as the end of the left arc and once as the start of the right arc.
inline void WriteTrajectoryCsv(std::ostream& os, const PiecewiseTrajectory& traj,
                               double resolution = 1e-2) {
  if (!(resolution > 0.0)) throw Error(ErrorCode::kDomain, "resolution must be positive");
  os << kTrajectoryCsvHeader << '\n';
  for (const PolyArc& arc : traj.arcs) {
    std::vector<double> times{arc.t_start};
    const double first = std::ceil((arc.t_start - traj.t_start()) / resolution);
    for (double k = first;; k += 1.0) {
      const double t = traj.t_start() + k * resolution;
      if (t >= arc.t_end) break;
      if (t > arc.t_start) times.push_back(t);
    }
    times.push_back(arc.t_end);
    for (double t : times) {
      const State x = arc.At(t);
      os << FormatDouble(t) << ',' << FormatDouble(x.position) << ',' << FormatDouble(x.speed)
         << ',' << FormatDouble(x.accel) << ',' << ToString(arc.kind) << '\n';
    }
  }
}

struct CsvSample {
  double t = 0.0;
  double p = 0.0;
  double v = 0.0;
  double u = 0.0;
  ArcKind kind = ArcKind::kUnconstrained;
};

namespace detail {

inline double ParseNumber(const std::string& text, const std::string& where) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(value)) {
    throw Error(ErrorCode::kParse, where + ": expected a finite number, got '" + text + "'");
  }
  return value;
}

inline std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(Trim(field));
  return out;
}

inline std::vector<std::string> Words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace detail

inline std::vector<CsvSample> ReadTrajectoryCsv(std::istream& is) {
  std::vector<CsvSample> out;
  std::string line;
  if (!std::getline(is, line) || detail::Trim(line) != kTrajectoryCsvHeader) {
    throw Error(ErrorCode::kParse, "line 1: missing trajectory CSV header");
  }
  for (int lineno = 2; std::getline(is, line); ++lineno) {
    if (detail::Trim(line).empty()) continue;
    const std::vector<std::string> f = detail::Split(line, ',');
    const std::string where = "line " + std::to_string(lineno);
    if (f.size() != 5) throw Error(ErrorCode::kParse, where + ": expected 5 fields");
    CsvSample s{detail::ParseNumber(f[0], where), detail::ParseNumber(f[1], where),
                detail::ParseNumber(f[2], where), detail::ParseNumber(f[3], where)};
    if (!ParseArcKind(f[4], &s.kind)) {
      throw Error(ErrorCode::kParse, where + ": unknown arc kind '" + f[4] + "'");
    }
    out.push_back(s);
  }
  return out;
}

/// Energy from samples, exact for affine control between consecutive samples
/// of the same arc.
inline double CostFromSamples(const std::vector<CsvSample>& samples) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const CsvSample& a = samples[k];
    const CsvSample& b = samples[k + 1];
    if (a.kind != b.kind) continue;
    total += (b.t - a.t) / 6.0 * (a.u * a.u + a.u * b.u + b.u * b.u);
  }
  return total;
}

/// Line-oriented `key = value` format; '#' starts a comment. Keys:
///   control_zone_length_m, merging_zone_size_m, vmin_mps, vmax_mps,
///   umin_mps2, umax_mps2, standstill_gap_m, time_headway_s,
///   conflict_separation_s, lanes (comma separated),
///   conflict = <lane> <lane>           (repeatable)
///   vehicle = <id> <lane> <t0_s> <v0_mps>   (repeatable)
inline ScenarioConfig ParseScenario(std::istream& is) {
  ScenarioConfig c;
  c.limits = Limits{};
  bool have_length = false, have_size = false, have_lanes = false, have_vmin = false;
  std::string raw;
  for (int lineno = 1; std::getline(is, raw); ++lineno) {
    const std::string where = "line " + std::to_string(lineno);
    const std::string line = detail::Trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kParse, where + ": expected key = value");
    const std::string key = detail::Trim(line.substr(0, eq));
    const std::string value = detail::Trim(line.substr(eq + 1));
    const std::string field = where + " (" + key + ")";
    if (key == "control_zone_length_m") {
      c.control_zone_length = detail::ParseNumber(value, field);
      have_length = true;
    } else if (key == "merging_zone_size_m") {
      c.merging_zone_size = detail::ParseNumber(value, field);
      have_size = true;
    } else if (key == "vmin_mps") {
      c.limits.vmin = detail::ParseNumber(value, field);
      have_vmin = true;
    } else if (key == "vmax_mps") {
      c.limits.vmax = detail::ParseNumber(value, field);
    } else if (key == "umin_mps2") {
      c.limits.umin = detail::ParseNumber(value, field);
    } else if (key == "umax_mps2") {
      c.limits.umax = detail::ParseNumber(value, field);
    } else if (key == "standstill_gap_m") {
      c.gap.standstill_m = detail::ParseNumber(value, field);
    } else if (key == "time_headway_s") {
      c.gap.headway_s = detail::ParseNumber(value, field);
    } else if (key == "conflict_separation_s") {
      c.conflict_separation = detail::ParseNumber(value, field);
    } else if (key == "lanes") {
      for (const std::string& lane : detail::Split(value, ',')) {
        if (lane.empty() || lane.find(' ') != std::string::npos) {
          throw Error(ErrorCode::kParse, field + ": bad lane name '" + lane + "'");
        }
        c.lanes.push_back(lane);
      }
      have_lanes = true;
    } else if (key == "conflict") {
      const auto w = detail::Words(value);
      if (w.size() != 2) throw Error(ErrorCode::kParse, field + ": expected two lane names");
      if (!c.HasLane(w[0]) || !c.HasLane(w[1])) {
        throw Error(ErrorCode::kParse, field + ": unknown lane (declare lanes first)");
      }
      c.conflicts.emplace_back(w[0], w[1]);
    } else if (key == "vehicle") {
      const auto w = detail::Words(value);
      if (w.size() != 4) {
        throw Error(ErrorCode::kParse, field + ": expected <id> <lane> <t0_s> <v0_mps>");
      }
      const double id = detail::ParseNumber(w[0], field + " id");
      if (id != std::floor(id) || std::abs(id) > 1e9) {
        throw Error(ErrorCode::kParse, field + ": vehicle id must be an integer");
      }
      if (!c.HasLane(w[1])) throw Error(ErrorCode::kParse, field + ": unknown lane " + w[1]);
      c.arrivals.push_back({static_cast<int>(id), w[1], detail::ParseNumber(w[2], field + " t0"),
                            detail::ParseNumber(w[3], field + " v0")});
    } else {
      throw Error(ErrorCode::kParse, where + ": unknown key '" + key + "'");
    }
  }
  if (!have_length) throw Error(ErrorCode::kParse, "missing control_zone_length_m");
  if (!have_size) throw Error(ErrorCode::kParse, "missing merging_zone_size_m");
  if (!have_lanes) throw Error(ErrorCode::kParse, "missing lanes");
  if (!have_vmin) throw Error(ErrorCode::kParse, "missing vmin_mps");
  try {
    c.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, e.what());
  }
  return c;
}

inline std::string FormatSummary(const SimulationReport& r) {
  std::ostringstream os;
  os << "id,lane,case,cost,t0_s,tm_s,t_f_s,exit_speed_mps\n";
  for (const VehiclePlan& p : r.plans) {
    os << p.id << ',' << p.lane << ',' << ToString(p.traj.constraint_case) << ','
       << FormatDouble(p.cost) << ',' << FormatDouble(p.bc.t0) << ',' << FormatDouble(p.bc.tm)
       << ',' << FormatDouble(p.t_f) << ',' << FormatDouble(p.exit_speed()) << '\n';
  }
  return os.str();
}

inline std::string FormatViolations(const SimulationReport& r) {
  std::ostringstream os;
  os << "kind,first,second,time_s,detail\n";
  for (const RearEndViolation& v : r.rear_end) {
    os << "rear_end," << v.follower << ',' << v.leader << ',' << FormatDouble(v.time)
       << ",gap " << FormatDouble(v.gap) << " m < " << FormatDouble(v.required) << " m\n";
  }
  for (const LateralViolation& v : r.lateral) {
    os << "lateral," << v.first << ',' << v.second << ',' << FormatDouble(v.overlap_start)
       << ",overlap until " << FormatDouble(v.overlap_end) << " s\n";
  }
  return os.str();
}

/// Whole report as one deterministic text block.
inline std::string FormatReport(const SimulationReport& r) {
  std::ostringstream os;
  os << "total_cost," << FormatDouble(r.total_cost) << '\n';
  for (const auto& [c, n] : r.case_counts) os << "case," << ToString(c) << ',' << n << '\n';
  os << FormatSummary(r) << FormatViolations(r);
  for (const VehiclePlan& p : r.plans) {
    os << "vehicle," << p.id << '\n';
    WriteTrajectoryCsv(os, p.traj);
  }
  return os.str();
}

}  // namespace ecotraj
