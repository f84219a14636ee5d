#include "kinoatlas/constraint.hpp"

#include <Eigen/QR>

namespace kinoatlas {

ConstraintSystem make_fd_constraint_system(Index nq, Index ne,
                                           std::function<VectorX(const VectorX&)> phi,
                                           Scalar fd_step) {
  ConstraintSystem cs;
  cs.nq = nq;
  cs.ne = ne;
  cs.phi = phi;
  cs.phi_jac = [phi, nq, ne, fd_step](const VectorX& q) {
    MatrixX jac(ne, nq);
    VectorX qp = q, qm = q;
    for (Index j = 0; j < nq; ++j) {
      qp[j] = q[j] + fd_step;
      qm[j] = q[j] - fd_step;
      jac.col(j) = (phi(qp) - phi(qm)) / (2.0 * fd_step);
      qp[j] = q[j];
      qm[j] = q[j];
    }
    return jac;
  };
  auto jac = cs.phi_jac;
  cs.phi_hess_action = [jac, nq, ne, fd_step](const VectorX& q, const VectorX& v) {
    MatrixX h(ne, nq);
    VectorX qp = q, qm = q;
    for (Index j = 0; j < nq; ++j) {
      qp[j] = q[j] + fd_step;
      qm[j] = q[j] - fd_step;
      h.col(j) = (jac(qp) * v - jac(qm) * v) / (2.0 * fd_step);
      qp[j] = q[j];
      qm[j] = q[j];
    }
    return h;
  };
  return cs;
}

VectorX eval_F(const ConstraintSystem& cs, const VectorX& x) {
  if (x.size() != cs.dim_ambient())
    throw std::invalid_argument("eval_F: state dimension mismatch");
  VectorX f(2 * cs.ne);
  f.head(cs.ne) = cs.phi(conf(x));
  f.tail(cs.ne) = cs.phi_jac(conf(x)) * vel(x);
  return f;
}

MatrixX eval_F_jacobian(const ConstraintSystem& cs, const VectorX& x) {
  if (x.size() != cs.dim_ambient())
    throw std::invalid_argument("eval_F_jacobian: state dimension mismatch");
  const MatrixX jac = cs.phi_jac(conf(x));
  MatrixX J = MatrixX::Zero(2 * cs.ne, 2 * cs.nq);
  J.topLeftCorner(cs.ne, cs.nq) = jac;
  J.bottomLeftCorner(cs.ne, cs.nq) = cs.phi_hess_action(conf(x), vel(x));
  J.bottomRightCorner(cs.ne, cs.nq) = jac;
  return J;
}

bool is_manifold_consistent(const ConstraintSystem& cs, const VectorX& x, Scalar eta) {
  return eval_F(cs, x).lpNorm<Eigen::Infinity>() <= eta;
}

MatrixX tangent_basis(const ConstraintSystem& cs, const VectorX& x) {
  if (cs.ne == 0) return MatrixX::Identity(cs.dim_ambient(), cs.dim_ambient());
  const MatrixX Fx = eval_F_jacobian(cs, x);
  Eigen::ColPivHouseholderQR<MatrixX> qr(Fx.transpose());
  if (qr.rank() < 2 * cs.ne)
    throw SingularityError("tangent_basis: constraint Jacobian is rank deficient");
  MatrixX Q = qr.householderQ();
  return Q.rightCols(cs.dim_x());
}

std::optional<VectorX> project_to_manifold(const ConstraintSystem& cs, VectorX x, Scalar eta,
                                           int max_iters) {
  for (int it = 0; it < max_iters; ++it) {
    VectorX r = eval_F(cs, x);
    if (r.lpNorm<Eigen::Infinity>() <= eta) return x;
    MatrixX J = eval_F_jacobian(cs, x);
    // least-norm correction: x -= J^T (J J^T)^{-1} r
    Eigen::LDLT<MatrixX> ldlt(J * J.transpose());
    if (ldlt.info() != Eigen::Success) return std::nullopt;
    x -= J.transpose() * ldlt.solve(r);
    if (!x.allFinite()) return std::nullopt;
  }
  if (eval_F(cs, x).lpNorm<Eigen::Infinity>() <= eta) return x;
  return std::nullopt;
}

}  // namespace kinoatlas
