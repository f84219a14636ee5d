#include "kinoatlas/point_on_circle.hpp"

namespace kinoatlas {

ConstraintSystem PointOnCircle::constraint_system() const {
  ConstraintSystem cs;
  cs.nq = 2;
  cs.ne = 1;
  const Scalar len2 = p_.length * p_.length;
  cs.phi = [len2](const VectorX& q) {
    return VectorX::Constant(1, q.squaredNorm() - len2);
  };
  cs.phi_jac = [](const VectorX& q) { return MatrixX(2.0 * q.transpose()); };
  cs.phi_hess_action = [](const VectorX&, const VectorX& v) {
    return MatrixX(2.0 * v.transpose());
  };
  return cs;
}

VectorX PointOnCircle::applied_forces(const VectorX& q, const VectorX&, const Action& u) const {
  if (u.size() != 1) throw std::invalid_argument("PointOnCircle: action size must be 1");
  if (std::abs(u[0]) > p_.torque_max + 1e-12)
    throw std::invalid_argument("PointOnCircle: torque exceeds tau_max");
  VectorX Q = p_.mass * VectorX(p_.gravity);
  // torque about the anchor: generalized force tau * dphi/dq = tau * perp(q)/|q|^2
  Q += u[0] / q.squaredNorm() * VectorX(perp(Vector2(q[0], q[1])));
  return Q;
}

Scalar PointOnCircle::total_energy(const VectorX& x) const {
  const auto q = conf(x);
  const auto qd = vel(x);
  return 0.5 * p_.mass * qd.squaredNorm() - p_.mass * p_.gravity.dot(Vector2(q[0], q[1]));
}

}  // namespace kinoatlas
