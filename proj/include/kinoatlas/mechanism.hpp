#pragma once

#include <memory>
#include <string>
#include <vector>

#include "kinoatlas/constraint.hpp"
#include "kinoatlas/types.hpp"

namespace kinoatlas {

/// Actuator torques/forces, one entry per actuated joint.
using Action = VectorX;

struct Segment {
  Vector2 a;
  Vector2 b;
};

/// Planar mechanical system: supplies the kinematic constraint system, the
/// terms of the Euler-Lagrange equations in multiplier form, and collision
/// geometry. Immutable after construction; all evaluations are pure.
class Mechanism {
 public:
  virtual ~Mechanism() = default;

  virtual std::string name() const = 0;
  virtual Index nq() const = 0;
  virtual Index nu() const = 0;
  virtual VectorX tau_max() const = 0;

  /// The constraint callbacks share ownership of the mechanism internals and
  /// stay valid after the Mechanism object is destroyed.
  virtual ConstraintSystem constraint_system() const = 0;

  virtual MatrixX mass_matrix(const VectorX& q) const = 0;

  /// Generalized force vector Q such that M qdd = Q + Phi_q^T lambda:
  /// gravity + springs + velocity (Coriolis/centrifugal) terms + actuator
  /// torques mapped to the actuated coordinates. Friction is not modeled.
  virtual VectorX applied_forces(const VectorX& q, const VectorX& qdot, const Action& u) const = 0;

  /// Kinetic + gravitational + spring potential energy [J].
  virtual Scalar total_energy(const VectorX& x) const = 0;

  /// Link geometry for collision checking at configuration q.
  virtual std::vector<Segment> link_segments(const VectorX& q) const = 0;

  Action zero_action() const { return Action::Zero(nu()); }
};

/// Bang-bang action discretization: the zero action plus, for each actuator,
/// +tau_max and -tau_max applied alone. Size 2 n_u + 1.
std::vector<Action> action_set(const Mechanism& m);

/// State-space vector field xdot = g(x, u) from the index-1 augmented system
///   [ M      Phi_q^T ] [ qdd    ]   [ Q                        ]
///   [ Phi_q  0       ] [ lambda ] = [ -(d/dq(Phi_q qdot)) qdot ]
/// Throws SingularityError when the augmented matrix is singular.
VectorX forward_dynamics(const Mechanism& m, const ConstraintSystem& cs, const VectorX& x,
                         const Action& u);

}  // namespace kinoatlas
