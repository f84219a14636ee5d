#include "kinoatlas/mechanism.hpp"

#include <Eigen/LU>

namespace kinoatlas {

std::vector<Action> action_set(const Mechanism& m) {
  const VectorX tau = m.tau_max();
  std::vector<Action> actions;
  actions.reserve(2 * m.nu() + 1);
  actions.push_back(m.zero_action());
  for (Index i = 0; i < m.nu(); ++i) {
    Action plus = m.zero_action();
    plus[i] = tau[i];
    actions.push_back(plus);
    Action minus = m.zero_action();
    minus[i] = -tau[i];
    actions.push_back(minus);
  }
  return actions;
}

VectorX forward_dynamics(const Mechanism& m, const ConstraintSystem& cs, const VectorX& x,
                         const Action& u) {
  const Index nq = cs.nq, ne = cs.ne;
  if (x.size() != 2 * nq || u.size() != m.nu())
    throw std::invalid_argument("forward_dynamics: dimension mismatch");
  const auto q = conf(x);
  const auto qd = vel(x);

  MatrixX A = MatrixX::Zero(nq + ne, nq + ne);
  A.topLeftCorner(nq, nq) = m.mass_matrix(q);
  const MatrixX jac = cs.phi_jac(q);
  A.topRightCorner(nq, ne) = jac.transpose();
  A.bottomLeftCorner(ne, nq) = jac;

  VectorX rhs(nq + ne);
  rhs.head(nq) = m.applied_forces(q, qd, u);
  rhs.tail(ne) = -(cs.phi_hess_action(q, qd) * qd);

  Eigen::FullPivLU<MatrixX> lu(A);
  if (!lu.isInvertible())
    throw SingularityError("forward_dynamics: singular augmented system");
  const VectorX sol = lu.solve(rhs);

  VectorX xdot(2 * nq);
  conf(xdot) = qd;
  vel(xdot) = sol.head(nq);
  return xdot;
}

}  // namespace kinoatlas
