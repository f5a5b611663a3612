#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "ecotraj/coordination.hpp"
#include "ecotraj/io.hpp"
#include "instances.hpp"

namespace ecotraj {
namespace {

ScenarioConfig TwoLanes() {
  ScenarioConfig c;
  c.control_zone_length = 200.0;
  c.merging_zone_size = 15.0;
  c.lanes = {"a", "b"};
  c.conflicts = {{"a", "b"}};
  c.limits = Limits{2.0, 25.0, -3.0, 2.5};
  return c;
}

VehiclePlan Occupancy(int id, const std::string& lane, double tm, double t_f) {
  VehiclePlan p;
  p.id = id;
  p.lane = lane;
  p.bc.tm = tm;
  p.t_f = t_f;
  return p;
}

TEST(Schedule, SingleVehicleCruises) {
  ScenarioConfig c = TwoLanes();
  c.arrivals = {{1, "a", 3.0, 16.0}};
  const std::vector<double> tm = AssignMergingTimes(c);
  ASSERT_EQ(tm.size(), 1u);
  EXPECT_DOUBLE_EQ(tm[0], 3.0 + 200.0 / 16.0);
  const SimulationReport r = ecotraj::Run(c);
  EXPECT_EQ(r.plans[0].traj.constraint_case, ConstraintCase::kUnconstrained);
  EXPECT_EQ(r.total_cost, 0.0);
  EXPECT_NEAR(r.plans[0].t_f, tm[0] + 15.0 / 16.0, 1e-12);
}

TEST(Schedule, SimultaneousConflictingArrivals) {
  ScenarioConfig c = TwoLanes();
  c.arrivals = {{1, "a", 0.0, 15.0}, {2, "b", 0.0, 15.0}};
  const SimulationReport r = ecotraj::Run(c);
  ASSERT_EQ(r.plans.size(), 2u);
  EXPECT_GE(r.plans[1].bc.tm, r.plans[0].t_f + c.conflict_separation - 1e-12);
  EXPECT_TRUE(r.lateral.empty());
  EXPECT_TRUE(r.Safe());
}

TEST(Schedule, MixedStreamIsSafe) {
  ScenarioConfig c = FourWayTemplate();
  c.arrivals = {{1, "north", 0.0, 15.0}, {2, "east", 0.5, 12.0}, {3, "south", 1.0, 17.0},
                {4, "north", 2.0, 16.0}, {5, "west", 2.5, 11.0}, {6, "east", 3.5, 14.0},
                {7, "south", 4.0, 10.5}, {8, "west", 5.0, 18.0}};
  const SimulationReport r = ecotraj::Run(c);
  ASSERT_EQ(r.plans.size(), 8u);
  EXPECT_TRUE(r.rear_end.empty());
  EXPECT_TRUE(r.lateral.empty());
  for (const VehiclePlan& p : r.plans) {
    EXPECT_LE(testing::WorstBoundViolation(p.traj, c.limits, 1e-3), 1e-6);
  }
}

TEST(Schedule, ExcessiveDelayIsInfeasible) {
  ScenarioConfig c = TwoLanes();
  c.limits.vmin = 15.0;
  c.merging_zone_size = 100.0;
  c.arrivals = {{1, "a", 0.0, 20.0}, {2, "b", 0.0, 20.0}};
  try {
    ecotraj::Run(c);
    FAIL() << "no throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInfeasible);
    EXPECT_NE(std::string(e.what()).find("vehicle 2"), std::string::npos);
  }
}

TEST(Schedule, DerivedScenarioOneVehicle) {
  ScenarioConfig c = TwoLanes();
  c.control_zone_length = 195.0;
  c.limits = Limits{1.0, 22.0, -3.0, 1.8};
  const VehiclePlan p = detail::PlanVehicle(c, {1, "a", 0.0, 13.4}, 10.0);
  EXPECT_EQ(p.traj.constraint_case, ConstraintCase::kUmaxAndVmax);
  EXPECT_NEAR(p.cost, 5.65894258, 1e-8);
  EXPECT_NEAR(p.t_f, 10.0 + 15.0 / 22.0, 1e-9);
}

TEST(FeasibleHorizonWindow, Bounds) {
  const Limits lim{2.0, 25.0, -3.0, 2.5};
  const HorizonWindow w = FeasibleHorizonWindow(15.0, 200.0, lim);
  EXPECT_NEAR(ReachableEnvelope({0, w.lo, 0, 200, 15}, lim).max_distance, 200.0, 1e-6);
  EXPECT_NEAR(ReachableEnvelope({0, w.hi, 0, 200, 15}, lim).min_distance, 200.0, 1e-6);
  EXPECT_LT(w.lo, 200.0 / 15.0);
  EXPECT_GT(w.hi, 200.0 / 15.0);
}

TEST(CheckRearEnd, LargeHeadwayIsClear) {
  ScenarioConfig c = TwoLanes();
  const VehiclePlan lead = detail::PlanVehicle(c, {1, "a", 0.0, 15.0}, 200.0 / 15.0);
  const VehiclePlan follow = detail::PlanVehicle(c, {2, "a", 5.0, 15.0}, 5.0 + 200.0 / 15.0);
  EXPECT_TRUE(CheckRearEnd({lead, follow}, c.gap, 1e-2).empty());
}

TEST(CheckRearEnd, OverlapReportsFirstViolation) {
  ScenarioConfig c = TwoLanes();
  const VehiclePlan lead = detail::PlanVehicle(c, {1, "a", 0.0, 12.0}, 200.0 / 12.0);
  const VehiclePlan follow = detail::PlanVehicle(c, {2, "a", 1.0, 18.0}, 1.0 + 200.0 / 18.0);
  const auto v = CheckRearEnd({lead, follow}, c.gap, 1e-2);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].follower, 2);
  EXPECT_EQ(v[0].leader, 1);
  // At t = 1 the leader is 12 m ahead; 5 + 0.5 * 18 = 14 m are required.
  EXPECT_DOUBLE_EQ(v[0].time, 1.0);
  EXPECT_LT(v[0].gap, v[0].required);
  // Different lanes are never compared.
  VehiclePlan other = follow;
  other.lane = "b";
  EXPECT_TRUE(CheckRearEnd({lead, other}, c.gap, 1e-2).empty());
}

TEST(CheckLateral, Intervals) {
  const ScenarioConfig c = TwoLanes();
  EXPECT_TRUE(CheckLateral({Occupancy(1, "a", 10, 11), Occupancy(2, "b", 12, 13)}, c).empty());
  EXPECT_TRUE(CheckLateral({Occupancy(1, "a", 10, 11), Occupancy(2, "b", 11, 12)}, c).empty());
  const auto v = CheckLateral({Occupancy(1, "a", 10, 11), Occupancy(2, "b", 10.5, 12)}, c);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].first, 1);
  EXPECT_EQ(v[0].second, 2);
  EXPECT_DOUBLE_EQ(v[0].overlap_start, 10.5);
  EXPECT_DOUBLE_EQ(v[0].overlap_end, 11.0);
  // Same lane does not conflict laterally.
  EXPECT_TRUE(CheckLateral({Occupancy(1, "a", 10, 11), Occupancy(2, "a", 10.5, 12)}, c).empty());
}

TEST(Run, EmptyArrivals) {
  const SimulationReport r = ecotraj::Run(TwoLanes());
  EXPECT_TRUE(r.plans.empty());
  EXPECT_EQ(r.total_cost, 0.0);
  EXPECT_TRUE(r.Safe());
  for (const auto& [c, n] : r.case_counts) EXPECT_EQ(n, 0);
}

TEST(Run, DeterministicReport) {
  const ScenarioConfig c = RandomScenario(5, 20);
  EXPECT_EQ(FormatReport(ecotraj::Run(c)), FormatReport(ecotraj::Run(c)));
  EXPECT_EQ(FormatReport(ecotraj::Run(RandomScenario(5, 20))), FormatReport(ecotraj::Run(c)));
}

TEST(Run, TotalIsSumOfPlans) {
  const SimulationReport r = ecotraj::Run(RandomScenario(6, 20));
  double sum = 0.0;
  int counted = 0;
  for (const VehiclePlan& p : r.plans) sum += p.cost;
  for (const auto& [c, n] : r.case_counts) counted += n;
  EXPECT_DOUBLE_EQ(r.total_cost, sum);
  EXPECT_EQ(counted, 20);
}

TEST(Run, RandomScenariosAreSafe) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const ScenarioConfig c = RandomScenario(seed, 20);
    const SimulationReport r = ecotraj::Run(c);
    EXPECT_TRUE(r.Safe()) << "seed " << seed;
    for (const VehiclePlan& p : r.plans) {
      EXPECT_LE(testing::WorstBoundViolation(p.traj, c.limits, 1e-3), 1e-6);
    }
  }
}

TEST(Run, RemovingAVehicleNeverRaisesOthersCost) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ScenarioConfig full = RandomScenario(seed, 12);
    std::map<int, double> base;
    for (const VehiclePlan& p : ecotraj::Run(full).plans) base[p.id] = p.cost;
    for (std::size_t drop = 0; drop < full.arrivals.size(); ++drop) {
      ScenarioConfig c = full;
      c.arrivals.erase(c.arrivals.begin() + static_cast<long>(drop));
      for (const VehiclePlan& p : ecotraj::Run(c).plans) {
        EXPECT_LE(p.cost, base[p.id] + 1e-9) << "seed " << seed << " drop " << drop;
      }
    }
  }
}

TEST(RandomScenario, ReproducibleAndSpaced) {
  const ScenarioConfig a = RandomScenario(9, 30);
  const ScenarioConfig b = RandomScenario(9, 30);
  ASSERT_EQ(a.arrivals.size(), 30u);
  std::map<std::string, double> last;
  for (std::size_t k = 0; k < a.arrivals.size(); ++k) {
    EXPECT_EQ(a.arrivals[k].t0, b.arrivals[k].t0);
    EXPECT_EQ(a.arrivals[k].v0, b.arrivals[k].v0);
    EXPECT_EQ(a.arrivals[k].lane, b.arrivals[k].lane);
    EXPECT_GE(a.arrivals[k].v0, 10.0);
    EXPECT_LE(a.arrivals[k].v0, 18.0);
    const auto it = last.find(a.arrivals[k].lane);
    if (it != last.end()) { EXPECT_GE(a.arrivals[k].t0 - it->second, 3.0 - 1e-12); }
    last[a.arrivals[k].lane] = a.arrivals[k].t0;
  }
  EXPECT_NO_THROW(a.Validate());
  EXPECT_NE(RandomScenario(10, 30).arrivals[0].t0, a.arrivals[0].t0);
}

TEST(ScenarioConfig, Validation) {
  ScenarioConfig c = TwoLanes();
  c.arrivals = {{1, "a", 2.0, 15.0}, {2, "b", 1.0, 15.0}};
  EXPECT_THROW(c.Validate(), Error);
  c.arrivals = {{1, "a", 1.0, 15.0}, {1, "b", 2.0, 15.0}};
  EXPECT_THROW(c.Validate(), Error);
  c.arrivals = {{1, "a", 1.0, 30.0}};
  EXPECT_THROW(c.Validate(), Error);
  c.arrivals = {{1, "c", 1.0, 15.0}};
  EXPECT_THROW(c.Validate(), Error);
  c.arrivals = {{1, "a", 1.0, 15.0}};
  c.limits.vmin = 0.0;
  EXPECT_THROW(c.Validate(), Error);
  c.limits.vmin = 2.0;
  EXPECT_NO_THROW(c.Validate());
}

}  // namespace
}  // namespace ecotraj
