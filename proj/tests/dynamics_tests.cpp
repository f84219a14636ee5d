#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "kinoatlas/mechanism.hpp"
#include "test_helpers.hpp"

using namespace kinoatlas;

namespace {

// Richardson-extrapolated directional derivative of the energy along xdot.
Scalar energy_rate(const Mechanism& m, const VectorX& x, const VectorX& xdot, Scalar s = 1e-3) {
  auto d = [&](Scalar step) {
    return (m.total_energy(x + step * xdot) - m.total_energy(x - step * xdot)) / (2.0 * step);
  };
  return (4.0 * d(s / 2.0) - d(s)) / 3.0;
}

VectorX feasible_linkage_state(const PlanarLinkage& mech, const VectorX& q_guess, CounterRng& rng,
                               Scalar vel_scale) {
  const ConstraintSystem cs = mech.constraint_system();
  auto x0 = project_to_manifold(cs, stack_state(q_guess, VectorX::Zero(cs.nq)), 1e-10);
  REQUIRE(x0.has_value());
  const VectorX x = test::random_nearby_state(cs, *x0, rng, 0.4);
  // replace the velocity with a random element of ker Phi_q
  const VectorX q = conf(x);
  Eigen::ColPivHouseholderQR<MatrixX> qr(cs.phi_jac(q).transpose());
  const MatrixX Q = qr.householderQ();
  const MatrixX N = Q.rightCols(cs.dim_c());
  VectorX z(cs.dim_c());
  for (Index i = 0; i < z.size(); ++i) z[i] = vel_scale * rng.gaussian();
  return stack_state(q, VectorX(N * z));
}

}  // namespace

TEST_CASE("mass matrix of the circle pendulum is m I") {
  auto pend = make_circle_pendulum();
  VectorX q(2);
  q << 0.3, -0.95;
  CHECK((pend->mass_matrix(q) - MatrixX::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("mass of a single hinged rod is m L^2 / 3") {
  LinkageSpec s;
  s.name = "rod_pendulum";
  LinkSpec rod;
  rod.mass = 2.0;
  rod.length = 1.5;
  rod.inertia = rod.mass * rod.length * rod.length / 12.0;
  rod.com = Vector2(0.75, 0.0);
  s.links = {rod};
  JointSpec j;
  j.parent = -1;
  j.child = 0;
  j.anchor = Vector2(0.0, 0.0);
  s.joints = {j};
  s.actuated = {0};
  s.tau_max = VectorX::Constant(1, 1.0);
  PlanarLinkage mech(std::move(s));

  const Scalar expected = 2.0 * 1.5 * 1.5 / 3.0;
  for (Scalar q : {0.0, 0.7, -2.0}) {
    const MatrixX M = mech.mass_matrix(VectorX::Constant(1, q));
    CHECK(M(0, 0) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("mass matrices are symmetric positive definite on random states") {
  CounterRng rng(17);
  auto check_model = [&](const PlanarLinkage& mech, const VectorX& guess) {
    for (int trial = 0; trial < 100; ++trial) {
      const VectorX x = feasible_linkage_state(mech, guess, rng, 0.5);
      const MatrixX M = mech.mass_matrix(conf(x));
      CHECK((M - M.transpose()).lpNorm<Eigen::Infinity>() <= 1e-12 * M.norm());
      Eigen::SelfAdjointEigenSolver<MatrixX> es(M);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  };
  check_model(*make_four_bar(), four_bar_guess(false));
  check_model(*make_five_bar(), five_bar_guess(0.0));
  check_model(*test::make_slider_crank(), (VectorX(4) << 0.6, -0.9, 1.0, 0.3).finished());
}

TEST_CASE("constraint derivatives match finite differences on every model") {
  CounterRng rng(29);
  auto check_model = [&](const PlanarLinkage& mech) {
    const ConstraintSystem cs = mech.constraint_system();
    for (int trial = 0; trial < 25; ++trial) {
      VectorX q(cs.nq), v(cs.nq);
      for (Index i = 0; i < cs.nq; ++i) q[i] = rng.uniform(-1.5, 1.5);
      for (Index i = 0; i < cs.nq; ++i) v[i] = rng.gaussian();
      const MatrixX J = cs.phi_jac(q);
      const MatrixX J_fd = test::fd_jacobian(cs.phi, q);
      CHECK((J - J_fd).lpNorm<Eigen::Infinity>() <= 1e-6 * (1.0 + J.lpNorm<Eigen::Infinity>()));
      const MatrixX H = cs.phi_hess_action(q, v);
      const MatrixX H_fd =
          test::fd_jacobian([&](const VectorX& z) { return VectorX(cs.phi_jac(z) * v); }, q);
      CHECK((H - H_fd).lpNorm<Eigen::Infinity>() <= 1e-5 * (1.0 + H.lpNorm<Eigen::Infinity>()));
    }
  };
  check_model(*make_four_bar());
  check_model(*make_five_bar());
  check_model(*test::make_slider_crank());
  check_model(*test::make_prismatic_closure_gadget());
}

TEST_CASE("gravity-only forces at rest") {
  auto pend = make_circle_pendulum();
  VectorX q(2), qd = VectorX::Zero(2);
  q << 0.0, -1.0;
  const VectorX Q = pend->applied_forces(q, qd, VectorX::Zero(1));
  CHECK(Q[0] == doctest::Approx(0.0));
  CHECK(Q[1] == doctest::Approx(-9.81));
}

TEST_CASE("torsional springs pull toward the rest angle") {
  LinkageSpec s;
  LinkSpec rod;
  rod.mass = 1.0;
  rod.length = 1.0;
  rod.inertia = 1.0 / 12.0;
  s.links = {rod};
  JointSpec j;
  j.parent = -1;
  j.child = 0;
  s.joints = {j};
  s.gravity = Vector2::Zero();
  SpringSpec sp;
  sp.type = SpringSpec::Type::Torsional;
  sp.coord = 0;
  sp.stiffness = 3.0;
  sp.rest = 0.5;
  s.springs = {sp};
  s.actuated = {0};
  s.tau_max = VectorX::Constant(1, 1.0);
  PlanarLinkage mech(std::move(s));

  const VectorX Q = mech.applied_forces(VectorX::Constant(1, 1.5), VectorX::Zero(1),
                                        VectorX::Zero(1));
  CHECK(Q[0] == doctest::Approx(-3.0 * (1.5 - 0.5)));
}

TEST_CASE("Coriolis terms vanish at zero velocity") {
  CounterRng rng(31);
  auto check_model = [&](const PlanarLinkage& mech) {
    // with gravity off and no springs/action, Q(q, 0) must vanish
    for (int trial = 0; trial < 20; ++trial) {
      VectorX q(mech.nq());
      for (Index i = 0; i < q.size(); ++i) q[i] = rng.uniform(-2.0, 2.0);
      LinkageSpec zg = mech.spec();
      zg.gravity = Vector2::Zero();
      zg.springs.clear();
      PlanarLinkage m2(std::move(zg));
      const VectorX Q = m2.applied_forces(q, VectorX::Zero(q.size()),
                                          VectorX::Zero(m2.nu()));
      CHECK(Q.lpNorm<Eigen::Infinity>() <= 1e-12);
    }
  };
  check_model(*make_four_bar());
  check_model(*make_five_bar());
}

TEST_CASE("forward dynamics of the circle pendulum") {
  auto pend = make_circle_pendulum();
  const ConstraintSystem cs = pend->constraint_system();
  const Action zero = pend->zero_action();

  SUBCASE("bottom rest is an equilibrium") {
    const VectorX xdot = forward_dynamics(*pend, cs, test::pendulum_state(-M_PI / 2.0, 0.0), zero);
    CHECK(xdot.lpNorm<Eigen::Infinity>() <= 1e-12);
  }
  SUBCASE("horizontal rest falls tangentially") {
    const VectorX xdot = forward_dynamics(*pend, cs, test::pendulum_state(0.0, 0.0), zero);
    VectorX expected(4);
    expected << 0.0, 0.0, 0.0, -9.81;
    CHECK((xdot - expected).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
  SUBCASE("the vector field is tangent to the manifold") {
    CounterRng rng(37);
    const auto actions = action_set(*pend);
    for (int trial = 0; trial < 100; ++trial) {
      const VectorX x = test::random_sphere_state(rng, 2, 2.0);
      const VectorX xdot = forward_dynamics(*pend, cs, x, actions[trial % actions.size()]);
      CHECK((eval_F_jacobian(cs, x) * xdot).lpNorm<Eigen::Infinity>() <= 1e-8);
    }
  }
}

TEST_CASE("forward dynamics tangency on the closed-chain models") {
  CounterRng rng(41);
  auto check_model = [&](const PlanarLinkage& mech, const VectorX& guess) {
    const ConstraintSystem cs = mech.constraint_system();
    const auto actions = action_set(mech);
    for (int trial = 0; trial < 60; ++trial) {
      const VectorX x = feasible_linkage_state(mech, guess, rng, 1.0);
      const VectorX xdot = forward_dynamics(mech, cs, x, actions[trial % actions.size()]);
      CHECK((eval_F_jacobian(cs, x) * xdot).lpNorm<Eigen::Infinity>() <= 1e-8);
    }
  };
  check_model(*make_four_bar(), four_bar_guess(false));
  check_model(*make_five_bar(), five_bar_guess(0.0));
  check_model(*test::make_slider_crank(), (VectorX(4) << 0.6, -0.9, 1.0, 0.3).finished());
}

TEST_CASE("forward dynamics raises SingularityError when Phi_q collapses") {
  auto pend = make_circle_pendulum();
  const ConstraintSystem cs = pend->constraint_system();
  VectorX x = VectorX::Zero(4);  // q = 0 is singular for the circle
  CHECK_THROWS_AS(forward_dynamics(*pend, cs, x, pend->zero_action()), SingularityError);
}

TEST_CASE("action sets are bang-bang plus drift") {
  SUBCASE("one actuator, tau 4") {
    auto pend = make_circle_pendulum(4.0);
    const auto set = action_set(*pend);
    REQUIRE(set.size() == 3);
    CHECK(set[0][0] == 0.0);
    CHECK(set[1][0] == 4.0);
    CHECK(set[2][0] == -4.0);
  }
  SUBCASE("two actuators give five actions") {
    CHECK(action_set(*make_five_bar()).size() == 5);
  }
  SUBCASE("four-bar has three actions") {
    CHECK(action_set(*make_four_bar()).size() == 3);
  }
}

TEST_CASE("total energy of the circle pendulum at the rest poses") {
  auto pend = make_circle_pendulum();
  CHECK(pend->total_energy(test::pendulum_state(-M_PI / 2.0, 0.0)) == doctest::Approx(-9.81));
  CHECK(pend->total_energy(test::pendulum_state(M_PI / 2.0, 0.0)) == doctest::Approx(9.81));
}

TEST_CASE("constraints are workless: dE/dt = 0 along the drift field") {
  CounterRng rng(43);
  auto check_model = [&](const Mechanism& mech, const VectorX& x) {
    const ConstraintSystem cs = mech.constraint_system();
    const VectorX xdot = forward_dynamics(mech, cs, x, mech.zero_action());
    CHECK(std::abs(energy_rate(mech, x, xdot)) <= 1e-9 * std::max(1.0, std::abs(mech.total_energy(x))));
  };
  for (int trial = 0; trial < 20; ++trial)
    check_model(*make_circle_pendulum(), test::random_sphere_state(rng, 2, 1.5));
  auto fourbar = make_four_bar();
  for (int trial = 0; trial < 20; ++trial)
    check_model(*fourbar, feasible_linkage_state(*fourbar, four_bar_guess(false), rng, 1.0));
  auto fivebar = make_five_bar();  // springs engaged: potential included in E
  for (int trial = 0; trial < 20; ++trial)
    check_model(*fivebar, feasible_linkage_state(*fivebar, five_bar_guess(0.0), rng, 1.0));
}

TEST_CASE("built-in model dimensions") {
  auto fourbar = make_four_bar();
  ConstraintSystem cs = fourbar->constraint_system();
  CHECK(cs.nq == 4);
  CHECK(cs.ne == 3);
  CHECK(cs.dim_c() == 1);
  CHECK(cs.dim_x() == 2);
  CHECK(action_set(*fourbar).size() == 3);

  auto fivebar = make_five_bar();
  cs = fivebar->constraint_system();
  CHECK(cs.nq == 5);
  CHECK(cs.ne == 3);
  CHECK(cs.dim_c() == 2);
  CHECK(cs.dim_x() == 4);
  CHECK(action_set(*fivebar).size() == 5);
}

TEST_CASE("linkage validation rejects bad specs") {
  LinkageSpec s;
  LinkSpec l;
  l.mass = -1.0;
  s.links = {l};
  JointSpec j;
  j.parent = -1;
  j.child = 0;
  s.joints = {j};
  CHECK_THROWS_AS(PlanarLinkage{s}, std::invalid_argument);

  LinkageSpec s2 = make_four_bar()->spec();
  s2.actuated = {0, 1};  // n_u > d_C
  s2.tau_max = VectorX::Constant(2, 1.0);
  CHECK_THROWS_AS(PlanarLinkage{s2}, std::invalid_argument);
}
