// Decomposition validation, single-mission planning on a small fixture, and
// an end-to-end single-vehicle run of the built-in scenario, all re-checked
// by the independent verifier.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "mtlplan/plan.hpp"
#include "mtlplan/scenario.hpp"

using namespace mtlplan;

namespace {

scenario::Scenario fixture() {
  std::ifstream in(std::string(MTLPLAN_TEST_DATA_DIR) + "/hover_mission.json");
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario::load_scenario(ss.str());
}

}  // namespace

TEST_CASE("scenario JSON round-trips") {
  auto s = fixture();
  auto s2 = scenario::load_scenario(scenario::scenario_to_json(s));
  CHECK(s2.missions.size() == s.missions.size());
  CHECK(s2.missions[0].subtasks[0].formula == s.missions[0].subtasks[0].formula);
  CHECK(s2.workspace.has_region("S"));
  CHECK((s2.missions[0].start - s.missions[0].start).norm() == 0.0);
}

TEST_CASE("validate_decomposition accepts the fixture and the builtin") {
  plan::validate_decomposition(fixture());
  plan::validate_decomposition(scenario::build_rescue_scenario(2));
}

TEST_CASE("validate_decomposition rejects an over-budget mission") {
  auto s = fixture();
  s.missions[0].subtasks[0].horizon = 25;  // sums past total_steps = 10
  CHECK_THROWS_AS(plan::validate_decomposition(s), plan::PlanError);
}

TEST_CASE("validate_decomposition rejects an illegal mode chain") {
  auto s = fixture();
  s.missions[0].subtasks[0].mode = dyn::ModeId::Land;
  s.missions[0].subtasks[1].mode = dyn::ModeId::Steer;  // Land -> Steer
  CHECK_THROWS_AS(plan::validate_decomposition(s), plan::PlanError);
}

TEST_CASE("validate_decomposition rejects an unbindable formula") {
  auto s = fixture();
  s.missions[0].subtasks[0].formula = "F[0,20] S";  // exceeds horizon 5
  CHECK_THROWS_AS(plan::validate_decomposition(s), plan::PlanError);
}

TEST_CASE("trajectory position is held past the end") {
  plan::Trajectory tr;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(dyn::kNumStates);
  a.head<3>() << 1, 2, 3;
  tr.states.push_back(a);
  CHECK(tr.pos(0) == Eigen::Vector3d(1, 2, 3));
  CHECK(tr.pos(99) == Eigen::Vector3d(1, 2, 3));
}

TEST_CASE("fixture mission plans and verifies") {
  auto s = fixture();
  plan::PlannerOptions opts;
  opts.milp.time_budget_sec = 30.0;
  auto fleet = plan::plan_fleet(s, opts);
  REQUIRE(fleet.success());
  const auto& m = fleet.missions[0];
  CHECK(m.traj.steps() == 10);
  CHECK(m.subtasks.size() == 2);
  // Reach step of the take-off leg is within its bound.
  CHECK(m.subtasks[0].reach_step >= 0);
  CHECK(m.subtasks[0].reach_step <= 5);
  // Every flown state stays inside S in x/y.
  for (const auto& x : m.traj.states) {
    CHECK(x(0) >= 4.0 - 1e-6);
    CHECK(x(0) <= 6.0 + 1e-6);
    CHECK(x(1) >= 4.0 - 1e-6);
  }
  auto bad = plan::verify_fleet(s, fleet);
  for (const auto& b : bad) MESSAGE(b);
  CHECK(bad.empty());
}

TEST_CASE("single-vehicle builtin rescue plans and verifies") {
  auto s = scenario::build_rescue_scenario(1);
  plan::PlannerOptions opts;
  opts.milp.time_budget_sec = 60.0;
  auto fleet = plan::plan_fleet(s, opts);
  REQUIRE(fleet.missions.size() == 1);
  if (!fleet.missions[0].success) MESSAGE(fleet.missions[0].failure);
  REQUIRE(fleet.success());

  const auto& m = fleet.missions[0];
  CHECK(m.subtasks.size() == 6);
  for (const auto& st : m.subtasks) {
    CAPTURE(st.label);
    // Waits plus flown steps stay within the allotted slot.
    CHECK(st.waits + st.horizon <= 14);
    if (st.reach_step >= 0) CHECK(st.reach_step <= st.horizon);
    CHECK(st.cpu_sec < 60.0);
  }
  auto bad = plan::verify_fleet(s, fleet);
  for (const auto& b : bad) MESSAGE(b);
  CHECK(bad.empty());
}

TEST_CASE("verifier flags a corrupted trajectory") {
  auto s = fixture();
  plan::PlannerOptions opts;
  opts.milp.time_budget_sec = 30.0;
  auto fleet = plan::plan_fleet(s, opts);
  REQUIRE(fleet.success());
  // Teleport one state: the dynamics residual check must trip.
  fleet.missions[0].traj.states[4](0) += 0.5;
  auto bad = plan::verify_fleet(s, fleet);
  CHECK_FALSE(bad.empty());
}

TEST_CASE("builtin scenario generator is deterministic and scales") {
  for (int n : {1, 2, 5, 10}) {
    auto s = scenario::build_rescue_scenario(n);
    CHECK(static_cast<int>(s.missions.size()) == n);
    plan::validate_decomposition(s);
    // Starts are pairwise separated by at least the collision diameter.
    for (size_t i = 0; i < s.missions.size(); ++i)
      for (size_t j = i + 1; j < s.missions.size(); ++j)
        CHECK((s.missions[i].start.head<3>() - s.missions[j].start.head<3>())
                  .lpNorm<Eigen::Infinity>() >= 2 * s.params.r_safe);
  }
  CHECK(scenario::scenario_to_json(scenario::build_rescue_scenario(3)) ==
        scenario::scenario_to_json(scenario::build_rescue_scenario(3)));
  CHECK_THROWS(scenario::build_rescue_scenario(0));
  CHECK_THROWS(scenario::build_rescue_scenario(11));
}
