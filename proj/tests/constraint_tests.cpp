#include <doctest.h>

#include "kinoatlas/constraint.hpp"
#include "kinoatlas/models.hpp"
#include "test_helpers.hpp"

using namespace kinoatlas;

TEST_CASE("eval_F stacks position and velocity residuals") {
  auto pend = make_circle_pendulum();
  const ConstraintSystem cs = pend->constraint_system();

  VectorX x(4);
  x << 0.0, -1.0, 0.0, 0.0;  // on the circle, at rest
  CHECK(eval_F(cs, x).lpNorm<Eigen::Infinity>() == doctest::Approx(0.0).epsilon(1e-15));

  x << 1.0, 1.0, 0.0, 0.0;  // off the circle
  VectorX f = eval_F(cs, x);
  CHECK(f[0] == doctest::Approx(1.0));
  CHECK(f[1] == doctest::Approx(0.0));

  x << 0.6, 0.8, -0.8, 0.6;  // tangent velocity
  f = eval_F(cs, x);
  CHECK(std::abs(f[0]) < 1e-15);
  CHECK(std::abs(f[1]) < 1e-15);
}

TEST_CASE("eval_F rejects dimension mismatches") {
  const ConstraintSystem cs = test::sphere_system();
  CHECK_THROWS_AS(eval_F(cs, VectorX::Zero(4)), std::invalid_argument);
}

TEST_CASE("eval_F_jacobian on the circle pendulum matches the analytic rows") {
  auto pend = make_circle_pendulum();
  const ConstraintSystem cs = pend->constraint_system();
  VectorX x(4);
  x << 0.0, -1.0, 0.0, 0.0;
  const MatrixX J = eval_F_jacobian(cs, x);
  MatrixX expected(2, 4);
  expected << 0, -2, 0, 0, 0, 0, 0, -2;
  CHECK((J - expected).lpNorm<Eigen::Infinity>() < 1e-15);
}

TEST_CASE("eval_F_jacobian matches finite differences on random feasible states") {
  CounterRng rng(7);
  for (const Index dim : {2, 3, 4}) {
    const ConstraintSystem cs = test::sphere_system(dim);
    for (int trial = 0; trial < 100; ++trial) {
      const VectorX x = test::random_sphere_state(rng, dim);
      const MatrixX J = eval_F_jacobian(cs, x);
      const MatrixX J_fd = test::fd_jacobian([&](const VectorX& z) { return eval_F(cs, z); }, x);
      CHECK((J - J_fd).norm() <= 1e-6 * (1.0 + J.norm()));
    }
  }
}

TEST_CASE("linear constraints have a state-independent Jacobian") {
  ConstraintSystem cs;
  cs.nq = 3;
  cs.ne = 1;
  cs.phi = [](const VectorX& q) { return VectorX::Constant(1, q[2]); };
  cs.phi_jac = [](const VectorX&) {
    MatrixX j = MatrixX::Zero(1, 3);
    j(0, 2) = 1.0;
    return j;
  };
  cs.phi_hess_action = [](const VectorX&, const VectorX&) { return MatrixX::Zero(1, 3); };

  CounterRng rng(3);
  VectorX xa(6), xb(6);
  for (Index i = 0; i < 6; ++i) xa[i] = rng.gaussian();
  for (Index i = 0; i < 6; ++i) xb[i] = rng.gaussian();
  CHECK((eval_F_jacobian(cs, xa) - eval_F_jacobian(cs, xb)).norm() == 0.0);
}

TEST_CASE("tangent_basis spans the kernel with orthonormal columns") {
  CounterRng rng(11);
  const ConstraintSystem sphere = test::sphere_system(3);
  for (int trial = 0; trial < 200; ++trial) {
    const VectorX x = test::random_sphere_state(rng, 3);
    const MatrixX U = tangent_basis(sphere, x);
    REQUIRE(U.cols() == 4);  // d_C = 2, d_X = 4
    CHECK((U.transpose() * U - MatrixX::Identity(4, 4)).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK((eval_F_jacobian(sphere, x) * U).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
}

TEST_CASE("tangent_basis of the circle pendulum at the bottom") {
  auto pend = make_circle_pendulum();
  const ConstraintSystem cs = pend->constraint_system();
  VectorX x(4);
  x << 0.0, -1.0, 0.0, 0.0;
  const MatrixX U = tangent_basis(cs, x);
  REQUIRE(U.cols() == 2);
  // span{(1,0,0,0),(0,0,1,0)} up to sign/order
  for (Index c = 0; c < 2; ++c) {
    CHECK(std::abs(U(1, c)) < 1e-12);
    CHECK(std::abs(U(3, c)) < 1e-12);
  }
  CHECK((U.transpose() * U - MatrixX::Identity(2, 2)).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("tangent_basis raises SingularityError at rank-deficient points") {
  const ConstraintSystem cs = test::sphere_system(3);
  VectorX x = VectorX::Zero(6);  // q = 0: Phi_q vanishes
  CHECK_THROWS_AS(tangent_basis(cs, x), SingularityError);
}

TEST_CASE("chart maps: coords, lift, and the round trip") {
  auto pend = make_circle_pendulum();
  const ConstraintSystem cs = pend->constraint_system();
  VectorX xc(4);
  xc << 0.0, -1.0, 0.0, 0.0;
  Chart c;
  c.id = 0;
  c.center = xc;
  c.basis = tangent_basis(cs, xc);
  c.radius = 1.0;

  SUBCASE("center maps to zero and back") {
    CHECK(chart_coords(c, xc).norm() == 0.0);
    CHECK((chart_lift(cs, c, VectorX::Zero(2)) - xc).norm() == 0.0);
  }
  SUBCASE("tangent points project back exactly") {
    VectorX w(2);
    w << 0.3, -0.2;
    const VectorX x = chart_point(c, w);
    CHECK((chart_coords(c, x) - w).lpNorm<Eigen::Infinity>() < 1e-14);
  }
  SUBCASE("coords are defined off the manifold") {
    VectorX x(4);
    x << 5.0, 3.0, 1.0, 1.0;
    CHECK(chart_coords(c, x).allFinite());
  }
  SUBCASE("lift lands on the manifold and inverts coords") {
    VectorX y(2);
    y << 0.1, 0.0;
    const VectorX x = chart_lift(cs, c, y, 1e-8, 50);
    CHECK(eval_F(cs, x).lpNorm<Eigen::Infinity>() <= 1e-8);
    CHECK((chart_coords(c, x) - y).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
  SUBCASE("far parameters diverge") {
    VectorX y(2);
    y << 10.0, 0.0;
    CHECK_THROWS_AS(chart_lift(cs, c, y, 1e-8, 50), LiftDivergedError);
  }
}

TEST_CASE("chart round trip on random sphere states") {
  CounterRng rng(23);
  const ConstraintSystem cs = test::sphere_system(3);
  int lifted = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const VectorX xc = test::random_sphere_state(rng, 3, 0.3);
    Chart c;
    c.center = xc;
    c.basis = tangent_basis(cs, xc);
    c.radius = 2.0;
    const VectorX x = test::random_nearby_state(cs, xc, rng, 0.2);
    try {
      const VectorX back = chart_lift(cs, c, chart_coords(c, x));
      CHECK((back - x).lpNorm<Eigen::Infinity>() <= 1e-7);  // 10 * eta_F
      ++lifted;
    } catch (const LiftDivergedError&) {
      // high curvature exit is allowed, but should be rare at this span
    }
  }
  CHECK(lifted > 450);
}

TEST_CASE("project_to_manifold repairs slightly off states and fails far away") {
  const ConstraintSystem cs = test::sphere_system(3);
  VectorX x(6);
  x << 1.05, 0.02, -0.01, 0.1, 0.2, 0.05;
  auto on = project_to_manifold(cs, x, 1e-8);
  REQUIRE(on.has_value());
  CHECK(eval_F(cs, *on).lpNorm<Eigen::Infinity>() <= 1e-8);
  CHECK((*on - x).norm() < 0.2);  // least-norm style correction stays close

  CHECK_FALSE(project_to_manifold(cs, VectorX::Zero(6), 1e-8).has_value());
}

TEST_CASE("finite-difference constraint fallback is usable") {
  const ConstraintSystem exact = test::sphere_system(3);
  const ConstraintSystem fd = make_fd_constraint_system(3, 1, exact.phi);
  CounterRng rng(5);
  const VectorX x = test::random_sphere_state(rng, 3);
  CHECK((fd.phi_jac(conf(x)) - exact.phi_jac(conf(x))).norm() < 1e-7);
  CHECK((fd.phi_hess_action(conf(x), vel(x)) - exact.phi_hess_action(conf(x), vel(x))).norm() <
        1e-4);
}
