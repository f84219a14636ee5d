#pragma once

#include "kinoatlas/mechanism.hpp"

namespace kinoatlas {

/// Point mass constrained to a circle of radius `length` around the origin,
/// in Cartesian coordinates q = (x, y) with Phi(q) = ||q||^2 - length^2.
/// A single actuator applies torque about the anchor. The smallest system
/// that exercises the full constraint machinery (n_q = 2, n_e = 1, d_X = 2).
class PointOnCircle : public Mechanism {
 public:
  struct Params {
    Scalar mass = 1.0;       // kg
    Scalar length = 1.0;     // m
    Scalar torque_max = 6.0; // N m
    Vector2 gravity{0.0, -9.81};
  };

  explicit PointOnCircle(Params p) : p_(p) {
    if (p_.mass <= 0.0 || p_.length <= 0.0)
      throw std::invalid_argument("PointOnCircle: mass and length must be positive");
  }

  std::string name() const override { return "point_on_circle"; }
  Index nq() const override { return 2; }
  Index nu() const override { return 1; }
  VectorX tau_max() const override { return VectorX::Constant(1, p_.torque_max); }

  ConstraintSystem constraint_system() const override;
  MatrixX mass_matrix(const VectorX&) const override {
    return p_.mass * MatrixX::Identity(2, 2);
  }
  VectorX applied_forces(const VectorX& q, const VectorX& qdot, const Action& u) const override;
  Scalar total_energy(const VectorX& x) const override;
  std::vector<Segment> link_segments(const VectorX& q) const override {
    return {Segment{Vector2(q[0], q[1]), Vector2(q[0], q[1])}};  // point payload
  }

  const Params& params() const { return p_; }

 private:
  Params p_;
};

}  // namespace kinoatlas
