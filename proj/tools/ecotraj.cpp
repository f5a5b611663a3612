// ecotraj: solve single instances, run intersection scenarios, export
// figure data.
//
// Exit codes: 0 ok, 2 bad input, 3 infeasible, 4 oracle gap too large,
// 5 safety violation.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ecotraj/constrained.hpp"
#include "ecotraj/coordination.hpp"
#include "ecotraj/figures.hpp"
#include "ecotraj/io.hpp"
#include "ecotraj/kkt.hpp"
#include "ecotraj/oracle.hpp"

namespace {

using namespace ecotraj;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitVerify = 4;
constexpr int kExitUnsafe = 5;

constexpr double kVerifyTolerance = 5e-3;

struct InstanceFlags {
  double L = std::nan("");
  double T = std::nan("");
  double v0 = std::nan("");
  double t0 = 0.0;
  double p0 = 0.0;
  double vmin = 0.0;
  double vmax = kInf;
  double umin = -kInf;
  double umax = kInf;

  void Register(CLI::App* app, bool required) {
    auto* l = app->add_option("--L,--distance", L, "distance to the merging zone [m]");
    auto* t = app->add_option("--T,--horizon", T, "time to the merging zone [s]");
    auto* v = app->add_option("--v0", v0, "entry speed [m/s]");
    if (required) {
      l->required();
      t->required();
      v->required();
    }
    app->add_option("--t0", t0, "entry time [s]");
    app->add_option("--p0", p0, "entry position [m]");
    app->add_option("--vmin", vmin, "minimum speed [m/s]");
    app->add_option("--vmax", vmax, "maximum speed [m/s]");
    app->add_option("--umin", umin, "minimum acceleration [m/s^2]");
    app->add_option("--umax", umax, "maximum acceleration [m/s^2]");
  }

  bool Given() const { return !std::isnan(L) && !std::isnan(T) && !std::isnan(v0); }
  BoundaryConditions Bc() const { return {t0, t0 + T, p0, p0 + L, v0}; }
  Limits Lim() const { return {vmin, vmax, umin, umax}; }
};

int ExitFor(const Error& e) {
  std::cerr << "error: " << e.what() << '\n';
  switch (e.code()) {
    case ErrorCode::kInfeasible: return kExitInfeasible;
    case ErrorCode::kDomain:
    case ErrorCode::kParse:
    case ErrorCode::kPrecondition: return kExitUsage;
    default: return 1;
  }
}

std::string Num(double x) { return FormatDouble(x); }

double RelativeGap(double analytic, double oracle) {
  const double scale = std::max({std::abs(analytic), std::abs(oracle), 1e-12});
  if (analytic == 0.0 && oracle < 1e-12) return 0.0;
  return (oracle - analytic) / scale;
}

std::size_t OracleSteps(double horizon, double resolution) {
  return std::max<std::size_t>(100, static_cast<std::size_t>(std::llround(horizon / resolution)));
}

void PrintSolution(const Solution& s) {
  const PiecewiseTrajectory& traj = s.trajectory;
  std::cout << "case: " << ToString(traj.constraint_case) << '\n';
  std::cout << "junctions_s:";
  for (double j : traj.junctions) std::cout << ' ' << Num(j);
  std::cout << '\n';
  for (std::size_t i = 0; i < traj.arcs.size(); ++i) {
    const PolyArc& a = traj.arcs[i];
    std::cout << "arc " << i << ": kind=" << ToString(a.kind) << " t=[" << Num(a.t_start) << ", "
              << Num(a.t_end) << "] a=" << Num(a.a) << " b=" << Num(a.b) << " c=" << Num(a.c)
              << " d=" << Num(a.d) << '\n';
  }
  std::cout << "cost: " << Num(Cost(traj)) << '\n';
}

int CmdSolve(const InstanceFlags& in, bool verify, const std::string& csv, double resolution) {
  try {
    const BoundaryConditions bc = in.Bc();
    const Limits lim = in.Lim();
    bc.Validate();
    lim.Validate();
    const Solution s = Solve(bc, lim);
    PrintSolution(s);
    if (!csv.empty()) {
      std::ofstream out(csv);
      if (!out) {
        std::cerr << "error: cannot write " << csv << '\n';
        return kExitUsage;
      }
      WriteTrajectoryCsv(out, s.trajectory, resolution);
    }
    if (verify) {
      const ValidationReport kkt = ValidateKkt(s.trajectory, s.costates, bc, lim);
      std::cout << "kkt: " << (kkt.Passed() ? "pass" : "fail") << '\n';
      for (const std::string& f : kkt.Failures()) std::cout << "kkt_failure: " << f << '\n';
      const DiscreteTrajectory d = SolveNumeric(bc, lim, OracleSteps(bc.horizon(), resolution));
      const double gap = RelativeGap(Cost(s.trajectory), d.cost);
      std::cout << "oracle_cost: " << Num(d.cost) << '\n';
      std::cout << "oracle_gap_rel: " << Num(gap) << '\n';
      if (std::abs(gap) > kVerifyTolerance || !kkt.Passed()) return kExitVerify;
    }
    return kExitOk;
  } catch (const Error& e) {
    return ExitFor(e);
  }
}

int CmdSimulate(const std::string& scenario_path, const std::string& out_dir, bool verify) {
  ScenarioConfig config;
  try {
    std::ifstream in(scenario_path);
    if (!in) {
      std::cerr << "error: cannot open " << scenario_path << '\n';
      return kExitUsage;
    }
    config = ParseScenario(in);
  } catch (const Error& e) {
    std::cerr << scenario_path << ": ";
    return ExitFor(e);
  }
  SimulationReport report;
  try {
    report = Run(config);
  } catch (const Error& e) {
    return ExitFor(e);
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << out_dir << '\n';
    return kExitUsage;
  }
  for (const VehiclePlan& p : report.plans) {
    std::ofstream f(fs::path(out_dir) / ("vehicle_" + std::to_string(p.id) + ".csv"));
    WriteTrajectoryCsv(f, p.traj);
  }
  std::ofstream(fs::path(out_dir) / "summary.csv") << FormatSummary(report);
  std::ofstream(fs::path(out_dir) / "violations.csv") << FormatViolations(report);

  std::cout << FormatSummary(report);
  std::cout << "total_cost: " << Num(report.total_cost) << '\n';
  for (const auto& [c, n] : report.case_counts) {
    if (n > 0) std::cout << "case_count " << ToString(c) << ": " << n << '\n';
  }
  std::cout << "rear_end_violations: " << report.rear_end.size() << '\n';
  std::cout << "lateral_violations: " << report.lateral.size() << '\n';

  bool gap_exceeded = false;
  if (verify) {
    for (const VehiclePlan& p : report.plans) {
      try {
        const DiscreteTrajectory d = SolveNumeric(p.bc, config.limits, OracleSteps(p.bc.horizon(), 1e-2));
        const double gap = RelativeGap(p.cost, d.cost);
        std::cout << "verify " << p.id << ": oracle_gap_rel " << Num(gap) << '\n';
        gap_exceeded = gap_exceeded || std::abs(gap) > kVerifyTolerance;
      } catch (const Error& e) {
        std::cout << "verify " << p.id << ": " << e.what() << '\n';
        gap_exceeded = true;
      }
    }
  }
  if (!report.Safe()) return kExitUnsafe;
  return gap_exceeded ? kExitVerify : kExitOk;
}

int CmdFigure(const std::string& id, const InstanceFlags& in, const std::string& out_dir,
              double resolution) {
  try {
    BoundaryConditions bc;
    Limits lim;
    std::optional<double> stated;
    std::string name = id;
    if (!id.empty()) {
      const std::optional<FigureFixture> f = FindFixture(id);
      if (!f) {
        std::cerr << "error: unknown scenario id " << id << " (expected paper-1 or paper-2)\n";
        return kExitUsage;
      }
      bc = f->bc;
      lim = f->limits;
      stated = f->stated_speed_junction;
    } else if (in.Given()) {
      bc = in.Bc();
      lim = in.Lim();
      name = "instance";
    } else {
      std::cerr << "error: give --scenario-id or --L/--T/--v0\n";
      return kExitUsage;
    }
    const FigureData fig = BuildFigure(bc, lim, stated);
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    {
      std::ofstream plot(fs::path(out_dir) / (name + "_plot.csv"));
      WritePlotData(plot, fig, resolution);
      std::ofstream diag(fs::path(out_dir) / (name + "_diagnosis.txt"));
      WriteDiagnosis(diag, fig);
    }
    WriteDiagnosis(std::cout, fig);
    if (!fig.diagnosis.jointly_feasible && id.empty()) return kExitInfeasible;
    return kExitOk;
  } catch (const Error& e) {
    return ExitFor(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-optimal fixed-horizon trajectories and intersection coordination"};
  app.require_subcommand(1);

  InstanceFlags solve_flags;
  bool solve_verify = false;
  std::string solve_csv;
  double solve_resolution = 1e-2;
  CLI::App* solve = app.add_subcommand("solve", "solve one instance in closed form");
  solve_flags.Register(solve, true);
  solve->add_flag("--verify", solve_verify, "check KKT conditions and compare with the oracle");
  solve->add_option("--csv", solve_csv, "write trajectory samples to this file");
  solve->add_option("--resolution", solve_resolution, "sampling step [s]")
      ->check(CLI::PositiveNumber);

  std::string scenario_path, out_dir = "out";
  bool sim_verify = false;
  CLI::App* simulate = app.add_subcommand("simulate", "run an intersection scenario");
  simulate->add_option("--scenario", scenario_path, "scenario file")->required();
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_flag("--verify", sim_verify, "compare each vehicle with the oracle");

  std::string figure_id, figure_out = ".";
  InstanceFlags figure_flags;
  double figure_resolution = 1e-2;
  CLI::App* figure = app.add_subcommand("figure", "export comparison plot data");
  figure->add_option("--scenario-id", figure_id, "paper-1 or paper-2");
  figure_flags.Register(figure, false);
  figure->add_option("--out", figure_out, "output directory");
  figure->add_option("--resolution", figure_resolution, "sampling step [s]")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*solve) return CmdSolve(solve_flags, solve_verify, solve_csv, solve_resolution);
  if (*simulate) return CmdSimulate(scenario_path, out_dir, sim_verify);
  return CmdFigure(figure_id, figure_flags, figure_out, figure_resolution);
}
