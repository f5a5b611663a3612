#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "ecotraj/constrained.hpp"
#include "ecotraj/figures.hpp"
#include "ecotraj/io.hpp"
#include "instances.hpp"

namespace ecotraj {
namespace {

std::string ParseErrorOf(const std::string& text) {
  std::istringstream in(text);
  try {
    ParseScenario(in);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    return e.what();
  }
  ADD_FAILURE() << "no throw";
  return "";
}

const char* kMinimal =
    "control_zone_length_m = 200\n"
    "merging_zone_size_m = 15\n"
    "vmin_mps = 2\n"
    "lanes = a, b\n";

TEST(FormatDouble, RoundTrips) {
  testing::Sampler s(1);
  for (int k = 0; k < 1000; ++k) {
    const double x = s.Uniform(-1e3, 1e3) * std::pow(10.0, s.Uniform(-8, 8));
    EXPECT_EQ(std::strtod(FormatDouble(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(FormatDouble(0.1), "0.10000000000000001");
}

TEST(TrajectoryCsv, HeaderAndJunctionRows) {
  const Solution s = Solve({0, 10, 0, 195, 13.4}, {0, 22, -kInf, 1.8});
  std::ostringstream out;
  WriteTrajectoryCsv(out, s.trajectory, 0.5);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t_s,p_m,v_mps,u_mps2,arc_kind");
  std::istringstream again(out.str());
  const std::vector<CsvSample> rows = ReadTrajectoryCsv(again);
  int at_first_junction = 0;
  for (const CsvSample& r : rows) at_first_junction += r.t == s.trajectory.junctions[0];
  EXPECT_EQ(at_first_junction, 2);
  EXPECT_EQ(rows.front().t, 0.0);
  EXPECT_EQ(rows.back().t, 10.0);
  EXPECT_EQ(rows.front().kind, ArcKind::kControlMax);
  EXPECT_EQ(rows.back().kind, ArcKind::kSpeedMax);
  EXPECT_EQ(out.str().find('\r'), std::string::npos);
}

TEST(TrajectoryCsv, RoundTripReproducesCost) {
  for (const testing::Instance& in : testing::CoveringSet(31, 3)) {
    const Solution s = Solve(in.bc, in.lim);
    std::stringstream buf;
    WriteTrajectoryCsv(buf, s.trajectory);
    const std::vector<CsvSample> rows = ReadTrajectoryCsv(buf);
    const double cost = Cost(s.trajectory);
    EXPECT_NEAR(CostFromSamples(rows), cost, 1e-6 * std::max(cost, 1e-12));
    for (const CsvSample& r : rows) {
      // Junction rows appear once per arc; match on the arc kind.
      const PolyArc* arc = nullptr;
      for (const PolyArc& a : s.trajectory.arcs) {
        if (a.kind == r.kind && r.t >= a.t_start && r.t <= a.t_end) arc = &a;
      }
      ASSERT_NE(arc, nullptr);
      const State x = arc->At(r.t);
      EXPECT_NEAR(r.p, x.position, 1e-6 * std::max(1.0, std::abs(x.position)));
      EXPECT_NEAR(r.v, x.speed, 1e-6);
    }
  }
}

TEST(TrajectoryCsv, ReadErrorsCiteLines) {
  auto code_and_text = [](const std::string& text) {
    std::istringstream in(text);
    try {
      ReadTrajectoryCsv(in);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParse);
      return std::string(e.what());
    }
    ADD_FAILURE() << "no throw";
    return std::string();
  };
  EXPECT_NE(code_and_text("t,p,v,u,kind\n").find("line 1"), std::string::npos);
  EXPECT_NE(code_and_text("t_s,p_m,v_mps,u_mps2,arc_kind\n0,0,1\n").find("line 2"),
            std::string::npos);
  EXPECT_NE(code_and_text("t_s,p_m,v_mps,u_mps2,arc_kind\n0,0,1,0,unconstrained\n0,x,1,0,"
                          "unconstrained\n")
                .find("line 3"),
            std::string::npos);
  EXPECT_NE(code_and_text("t_s,p_m,v_mps,u_mps2,arc_kind\n0,0,1,0,coasting\n").find("coasting"),
            std::string::npos);
}

TEST(ParseScenario, BundledFile) {
  std::ifstream in(std::string(ECOTRAJ_SCENARIO_DIR) + "/four_way.scn");
  ASSERT_TRUE(in);
  const ScenarioConfig c = ParseScenario(in);
  EXPECT_EQ(c.control_zone_length, 200.0);
  EXPECT_EQ(c.merging_zone_size, 15.0);
  EXPECT_EQ(c.lanes.size(), 4u);
  EXPECT_EQ(c.conflicts.size(), 4u);
  EXPECT_TRUE(c.Conflicting("east", "north"));
  EXPECT_FALSE(c.Conflicting("north", "south"));
  ASSERT_EQ(c.arrivals.size(), 4u);
  EXPECT_EQ(c.arrivals[3].lane, "north");
  EXPECT_EQ(c.arrivals[3].v0, 17.0);
  EXPECT_EQ(c.limits.umin, -3.0);
  EXPECT_EQ(c.gap.headway_s, 0.5);
}

TEST(ParseScenario, DefaultsAndComments) {
  std::istringstream in(std::string(kMinimal) + "# a comment\n\nvehicle = 7 b 1.5 12 # inline\n");
  const ScenarioConfig c = ParseScenario(in);
  EXPECT_EQ(c.limits.vmax, kInf);
  EXPECT_EQ(c.gap.standstill_m, 5.0);
  EXPECT_EQ(c.conflict_separation, 0.1);
  ASSERT_EQ(c.arrivals.size(), 1u);
  EXPECT_EQ(c.arrivals[0].id, 7);
  EXPECT_EQ(c.arrivals[0].t0, 1.5);
}

TEST(ParseScenario, Errors) {
  const std::string base = kMinimal;
  EXPECT_NE(ParseErrorOf(base + "speed = 3\n").find("line 5"), std::string::npos);
  EXPECT_NE(ParseErrorOf(base + "vmax_mps = fast\n").find("vmax_mps"), std::string::npos);
  EXPECT_NE(ParseErrorOf(base + "no equals sign\n").find("line 5"), std::string::npos);
  EXPECT_NE(ParseErrorOf(base + "vehicle = 1 a 0\n").find("line 5"), std::string::npos);
  EXPECT_NE(ParseErrorOf(base + "vehicle = 1 c 0 10\n").find("unknown lane"), std::string::npos);
  EXPECT_NE(ParseErrorOf(base + "conflict = a\n").find("line 5"), std::string::npos);
  EXPECT_NE(ParseErrorOf(base + "vehicle = 1.5 a 0 10\n").find("integer"), std::string::npos);
  EXPECT_NE(ParseErrorOf("merging_zone_size_m = 15\nvmin_mps = 2\nlanes = a\n")
                .find("control_zone_length_m"),
            std::string::npos);
  EXPECT_NE(ParseErrorOf(base + "vehicle = 1 a 5 10\nvehicle = 2 a 1 10\n").find("sorted"),
            std::string::npos);
}

TEST(Report, SummaryAndViolations) {
  std::istringstream in(std::string(kMinimal) + "conflict = a b\nvehicle = 1 a 0 15\n");
  const SimulationReport r = ecotraj::Run(ParseScenario(in));
  const std::string summary = FormatSummary(r);
  EXPECT_EQ(summary.substr(0, summary.find('\n')), "id,lane,case,cost,t0_s,tm_s,t_f_s,exit_speed_mps");
  EXPECT_NE(summary.find("1,a,Unconstrained,0,0,"), std::string::npos);
  EXPECT_EQ(FormatViolations(r), "kind,first,second,time_s,detail\n");
}

TEST(Figure, FixtureOneDiagnosis) {
  const FigureFixture f = *FindFixture("paper-1");
  const FigureData fig = BuildFigure(f.bc, f.limits, f.stated_speed_junction);
  const FigureDiagnosis& d = fig.diagnosis;
  EXPECT_FALSE(d.jointly_feasible);
  EXPECT_NEAR(*d.speed_junction, 6.98, 0.01);
  EXPECT_EQ(*d.stated_speed_junction, 7.79);
  EXPECT_NEAR(d.envelope.max_distance, 199.46, 0.01);
  EXPECT_NEAR(fig.series.front().trajectory.Eval(0.0).accel, 1.98, 1e-12);
  std::vector<std::string> names;
  for (const FigureSeries& s : fig.series) names.push_back(s.name);
  EXPECT_EQ(names, (std::vector<std::string>{"unconstrained", "speed_only", "control_only"}));
  std::ostringstream diag;
  WriteDiagnosis(diag, fig);
  EXPECT_NE(diag.str().find("jointly_feasible: false"), std::string::npos);
  EXPECT_NE(diag.str().find("7.79"), std::string::npos);
}

TEST(Figure, FixtureTwoDiagnosis) {
  const FigureFixture f = *FindFixture("paper-2");
  const FigureData fig = BuildFigure(f.bc, f.limits);
  const FigureDiagnosis& d = fig.diagnosis;
  EXPECT_NEAR(*d.control_junction, 7.418, 0.005);
  EXPECT_NEAR(*d.speed_at_control_exit, 23.41, 0.01);
  EXPECT_GT(*d.speed_at_control_exit, f.limits.vmax);
  EXPECT_TRUE(*d.coupled_speed_printed);
  EXPECT_TRUE(*d.coupled_speed);
  EXPECT_FALSE(FindFixture("paper-3").has_value());
}

TEST(Figure, FeasibleInstancePlotData) {
  const FigureData fig = BuildFigure({0, 10, 0, 195, 13.4}, {0, 22, -kInf, 1.8});
  ASSERT_EQ(fig.series.back().name, "final");
  EXPECT_EQ(fig.series.back().trajectory.constraint_case, ConstraintCase::kUmaxAndVmax);
  std::ostringstream out;
  WritePlotData(out, fig, 0.1);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t_s,series,value");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, static_cast<int>(fig.series.size()) * 3 * 101);
  EXPECT_NE(out.str().find("final.u"), std::string::npos);
}

}  // namespace
}  // namespace ecotraj
