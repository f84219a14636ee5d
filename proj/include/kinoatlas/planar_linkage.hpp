#pragma once

#include "kinoatlas/mechanism.hpp"

namespace kinoatlas {

enum class JointType { Revolute, Prismatic };

struct LinkSpec {
  std::string name;
  Scalar mass = 1.0;        // kg
  Scalar inertia = 0.0;     // kg m^2 about the COM
  Scalar length = 1.0;      // m, collision segment from origin to (length, 0)
  Vector2 com{0.5, 0.0};    // m, in link frame
};

/// Tree joint driving `child` relative to `parent` (-1 = ground). The child
/// frame origin sits at `anchor` (expressed in the parent frame); revolute
/// joints rotate it by mount_angle + q, prismatic joints translate it by
/// q * axis after rotating by mount_angle.
struct JointSpec {
  JointType type = JointType::Revolute;
  int parent = -1;
  int child = 0;
  Vector2 anchor{0.0, 0.0};
  Scalar mount_angle = 0.0;
  Vector2 axis{1.0, 0.0};
};

/// Loop-closing joint between anchor_a on link_a and anchor_b on link_b.
/// It carries its own generalized coordinate (appended after the tree
/// coordinates) and contributes three constraint equations: two position
/// coincidence rows and one relative-orientation row.
struct ClosureSpec {
  JointType type = JointType::Revolute;
  int link_a = 0;
  int link_b = -1;
  Vector2 anchor_a{0.0, 0.0};
  Vector2 anchor_b{0.0, 0.0};
  Scalar mount_angle = 0.0;
  Vector2 axis{1.0, 0.0};
};

struct SpringSpec {
  enum class Type { Torsional, Linear };
  Type type = Type::Linear;
  Scalar stiffness = 0.0;
  Scalar rest = 0.0;   // rad for torsional, m for linear
  int coord = 0;       // torsional: generalized coordinate index
  int link_a = 0;      // linear endpoints (-1 = ground, points in link frames)
  int link_b = -1;
  Vector2 point_a{0.0, 0.0};
  Vector2 point_b{0.0, 0.0};
};

struct LinkageSpec {
  std::string name;
  std::vector<LinkSpec> links;
  std::vector<JointSpec> joints;
  std::vector<ClosureSpec> closures;
  std::vector<int> actuated;  // coordinate indices
  VectorX tau_max;            // one entry per actuated coordinate
  std::vector<SpringSpec> springs;
  Vector2 gravity{0.0, -9.81};
};

/// Planar closed-chain linkage in relative joint coordinates. One coordinate
/// per tree joint plus one per loop closure; each closure adds three
/// constraint equations, so n_e = 3 * #closures. All derivative maps
/// (constraint Jacobian, Hessian action, Coriolis terms) are analytic.
class PlanarLinkage : public Mechanism {
 public:
  explicit PlanarLinkage(LinkageSpec spec);

  std::string name() const override;
  Index nq() const override;
  Index nu() const override;
  VectorX tau_max() const override;
  ConstraintSystem constraint_system() const override;
  MatrixX mass_matrix(const VectorX& q) const override;
  VectorX applied_forces(const VectorX& q, const VectorX& qdot, const Action& u) const override;
  Scalar total_energy(const VectorX& x) const override;
  std::vector<Segment> link_segments(const VectorX& q) const override;

  const LinkageSpec& spec() const;

 private:
  struct Core;
  std::shared_ptr<const Core> core_;
};

}  // namespace kinoatlas
