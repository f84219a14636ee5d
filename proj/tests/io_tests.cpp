#include <doctest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "kinoatlas/problem_io.hpp"
#include "kinoatlas/trajectory.hpp"
#include "test_helpers.hpp"

using namespace kinoatlas;
using nlohmann::json;

namespace {
const std::string kProblems = KINOATLAS_PROBLEMS_DIR;
}

TEST_CASE("shipped problem files load and project cleanly") {
  for (const char* name :
       {"pendulum_swingup.json", "fourbar.json", "fivebar_wall.json", "pendulum_drift.json"}) {
    INFO(name);
    const Problem p = load_problem(kProblems + "/" + name);
    CHECK(is_manifold_consistent(p.cs, p.x_start, p.params.eta_F));
    CHECK(is_manifold_consistent(p.cs, p.x_goal, p.params.eta_F));
    CHECK(p.params.rho < p.params.rho_s);
  }
}

TEST_CASE("shipped four-bar matches the built-in factory") {
  const Problem p = load_problem(kProblems + "/fourbar.json");
  auto factory = make_four_bar();
  const ConstraintSystem a = p.cs;
  const ConstraintSystem b = factory->constraint_system();
  REQUIRE(a.nq == b.nq);
  REQUIRE(a.ne == b.ne);
  CounterRng rng(3);
  for (int i = 0; i < 20; ++i) {
    VectorX q(a.nq);
    for (Index k = 0; k < q.size(); ++k) q[k] = rng.uniform(-2.0, 2.0);
    CHECK((a.phi(q) - b.phi(q)).lpNorm<Eigen::Infinity>() < 1e-12);
  }
  CHECK(p.mechanism->tau_max()[0] == factory->tau_max()[0]);
}

TEST_CASE("shipped five-bar matches the built-in factory") {
  const Problem p = load_problem(kProblems + "/fivebar_wall.json");
  auto factory = make_five_bar();
  const ConstraintSystem a = p.cs;
  const ConstraintSystem b = factory->constraint_system();
  REQUIRE(a.nq == 5);
  REQUIRE(a.ne == 3);
  CounterRng rng(5);
  for (int i = 0; i < 20; ++i) {
    VectorX q(a.nq);
    for (Index k = 0; k < q.size(); ++k) q[k] = rng.uniform(-2.0, 2.0);
    CHECK((a.phi(q) - b.phi(q)).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("malformed problems fail with the field named") {
  json j;
  j["mechanism"] = {{"type", "point_on_circle"}};
  // missing query
  CHECK_THROWS_WITH_AS(parse_problem(j), doctest::Contains("query"), std::runtime_error);

  j["query"] = {{"q_start", {0.0, -1.0}},
                {"qdot_start", {0.0, 0.0}},
                {"q_goal", {0.0, 1.0}},
                {"qdot_goal", {0.0, 0.0}}};
  CHECK_NOTHROW(parse_problem(j));

  SUBCASE("wrong query length") {
    j["query"]["q_start"] = {0.0};
    CHECK_THROWS_WITH_AS(parse_problem(j), doctest::Contains("q_start"), std::runtime_error);
  }
  SUBCASE("unknown mechanism type") {
    j["mechanism"]["type"] = "hexapod";
    CHECK_THROWS_WITH_AS(parse_problem(j), doctest::Contains("mechanism"), std::runtime_error);
  }
  SUBCASE("bad rho ordering") {
    j["params"] = {{"rho_s", 1.0}, {"rho", 2.0}};
    CHECK_THROWS_WITH_AS(parse_problem(j), doctest::Contains("rho"), std::runtime_error);
  }
  SUBCASE("unprojectable query") {
    j["query"]["q_start"] = {0.0, 0.0};  // circle center: projection cannot converge
    CHECK_THROWS_WITH_AS(parse_problem(j), doctest::Contains("projection"), std::runtime_error);
  }
  SUBCASE("negative obstacle radius") {
    j["world"] = {{"obstacles", {{{"type", "circle"}, {"center", {0, 0}}, {"radius", -1.0}}}}};
    CHECK_THROWS_WITH_AS(parse_problem(j), doctest::Contains("radius"), std::runtime_error);
  }
}

TEST_CASE("rho_s defaults to the C-space dimension") {
  json j;
  j["mechanism"] = {{"type", "point_on_circle"}};
  j["query"] = {{"q_start", {0.0, -1.0}},
                {"qdot_start", {0.0, 0.0}},
                {"q_goal", {0.0, 1.0}},
                {"qdot_goal", {0.0, 0.0}}};
  const Problem p = parse_problem(j);
  CHECK(p.params.rho_s == 1.0);
  CHECK(p.params.rho == 0.5);

  const Problem five = load_problem(kProblems + "/fivebar_wall.json");
  CHECK(five.params.rho_s == doctest::Approx(2.0));
}

TEST_CASE("trajectory files round-trip through the schedule reader") {
  Trajectory traj;
  Action u0 = VectorX::Constant(1, 0.0), u1 = VectorX::Constant(1, 4.0);
  traj.samples.push_back({0.0, (VectorX(4) << 0, -1, 0, 0).finished(), u1});
  traj.samples.push_back({0.125, (VectorX(4) << 0.1, -0.99, 0.3, 0.05).finished(), u1});
  traj.samples.push_back({0.25, (VectorX(4) << 0.2, -0.97, 0.4, 0.08).finished(), u0});
  traj.samples.push_back({0.5, (VectorX(4) << 0.3, -0.95, 0.5, 0.15).finished(), u0});
  traj.schedule = {{u1, 0.25}, {u0, 0.25}};
  traj.total_time = 0.5;

  std::stringstream s1;
  write_trajectory_tsv(s1, traj, 2, 1);
  const ActionSchedule from_traj = read_action_schedule(s1);
  REQUIRE(from_traj.size() == 2);
  CHECK(from_traj[0].u[0] == 4.0);
  CHECK(from_traj[0].duration == doctest::Approx(0.25));
  CHECK(from_traj[1].u[0] == 0.0);
  CHECK(from_traj[1].duration == doctest::Approx(0.25));

  std::stringstream s2;
  write_actions_tsv(s2, traj.schedule, 1);
  const ActionSchedule from_actions = read_action_schedule(s2);
  REQUIRE(from_actions.size() == 2);
  CHECK(from_actions[0].duration == 0.25);  // exact: full-precision round trip
}

TEST_CASE("format_scalar round-trips doubles exactly") {
  CounterRng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const Scalar v = rng.gaussian() * std::pow(10.0, rng.uniform(-8, 8));
    CHECK(std::stod(format_scalar(v)) == v);
  }
}

TEST_CASE("world section parses every primitive") {
  json j = {{"obstacles",
             {{{"type", "circle"}, {"center", {1.0, 2.0}}, {"radius", 0.5}},
              {{"type", "segment"}, {"a", {0.0, 0.0}}, {"b", {1.0, 0.0}}, {"radius", 0.1}},
              {{"type", "box"}, {"min", {-1.0, -1.0}}, {"max", {1.0, 1.0}}}}},
            {"workspace_box", {{"min", {-5.0, -5.0}}, {"max", {5.0, 5.0}}}},
            {"joint_limits", {{{"coord", 0}, {"min", -3.0}, {"max", 3.0}}}},
            {"self_collision_pairs", {{0, 2}}}};
  const World w = parse_world(j, 4);
  CHECK(w.circles.size() == 1);
  CHECK(w.segments.size() == 1);
  CHECK(w.boxes.size() == 1);
  CHECK(w.workspace.has_value());
  CHECK(w.joint_limits.size() == 1);
  CHECK(w.self_collision_pairs.size() == 1);
}
