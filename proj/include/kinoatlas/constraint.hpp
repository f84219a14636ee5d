#pragma once

#include <functional>
#include <optional>

#include "kinoatlas/errors.hpp"
#include "kinoatlas/types.hpp"

namespace kinoatlas {

/// Kinematic constraint system Phi(q) = 0 together with its first derivative
/// maps. `phi_hess_action(q, v)` is the matrix d/dq [phi_jac(q) v] for a fixed
/// vector v; it appears both in the state-constraint Jacobian and in the
/// augmented dynamics right-hand side.
struct ConstraintSystem {
  Index nq = 0;
  Index ne = 0;
  std::function<VectorX(const VectorX&)> phi;
  std::function<MatrixX(const VectorX&)> phi_jac;
  std::function<MatrixX(const VectorX&, const VectorX&)> phi_hess_action;

  Index dim_c() const { return nq - ne; }    // configuration manifold
  Index dim_x() const { return 2 * dim_c(); }  // state manifold
  Index dim_ambient() const { return 2 * nq; }
};

/// Builds a constraint system from phi alone, deriving phi_jac by central
/// differences and phi_hess_action by differencing phi_jac. Convenient for
/// user-defined models; roughly 6 correct digits instead of machine accuracy.
ConstraintSystem make_fd_constraint_system(Index nq, Index ne,
                                           std::function<VectorX(const VectorX&)> phi,
                                           Scalar fd_step = 1e-6);

/// Stacked state constraint F(x) = [Phi(q); Phi_q(q) qdot], length 2 n_e.
VectorX eval_F(const ConstraintSystem& cs, const VectorX& x);

/// Jacobian of F with respect to x = (q, qdot):
///   [ Phi_q            0     ]
///   [ d/dq(Phi_q qdot) Phi_q ]
MatrixX eval_F_jacobian(const ConstraintSystem& cs, const VectorX& x);

/// States with ||F(x)||_inf <= eta are considered to lie on the manifold.
bool is_manifold_consistent(const ConstraintSystem& cs, const VectorX& x, Scalar eta);

/// Orthonormal basis of ker F_x(x), i.e. of the tangent space of the state
/// manifold, as the trailing columns of the Q factor of F_x^T. Throws
/// SingularityError when F_x is rank deficient.
MatrixX tangent_basis(const ConstraintSystem& cs, const VectorX& x);

/// Least-norm Gauss-Newton projection of an ambient point onto {F(x) = 0}.
/// Returns nullopt when the iteration fails to reach ||F||_inf <= eta.
std::optional<VectorX> project_to_manifold(const ConstraintSystem& cs, VectorX x, Scalar eta,
                                           int max_iters = 50);

}  // namespace kinoatlas
