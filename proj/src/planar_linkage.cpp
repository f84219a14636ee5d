#include "kinoatlas/planar_linkage.hpp"

#include <cmath>

namespace kinoatlas {

namespace {
Vector2 rot(Scalar th, const Vector2& v) {
  const Scalar c = std::cos(th), s = std::sin(th);
  return Vector2(c * v.x() - s * v.y(), s * v.x() + c * v.y());
}
}  // namespace

struct PlanarLinkage::Core {
  LinkageSpec spec;
  Index nj = 0;   // tree joints
  Index ncl = 0;  // loop closures
  Index nq = 0;
  Index ne = 0;
  std::vector<VectorX> rot_ind;  // per link: dTheta_l / dq (constant)

  // ---- forward kinematics over the tree --------------------------------

  struct Kin {
    std::vector<Scalar> theta;
    std::vector<Vector2> origin;
    std::vector<MatrixX> J;  // 2 x nq origin Jacobians
  };

  Kin kinematics(const VectorX& q) const {
    const size_t nl = spec.links.size();
    Kin k{std::vector<Scalar>(nl, 0.0), std::vector<Vector2>(nl, Vector2::Zero()),
          std::vector<MatrixX>(nl, MatrixX::Zero(2, nq))};
    for (Index j = 0; j < nj; ++j) {
      const JointSpec& jt = spec.joints[static_cast<size_t>(j)];
      const int p = jt.parent, c = jt.child;
      const Scalar th_p = p < 0 ? 0.0 : k.theta[p];
      const VectorX& t_p = rotation_indicator(p);
      if (jt.type == JointType::Revolute) {
        const Vector2 A = rot(th_p, jt.anchor);
        k.theta[c] = th_p + jt.mount_angle + q[j];
        k.origin[c] = (p < 0 ? Vector2::Zero() : k.origin[p]) + A;
        k.J[c] = parent_J(k, p) + perp(A) * t_p.transpose();
      } else {
        const Vector2 D = rot(th_p, jt.anchor + q[j] * jt.axis);
        const Vector2 w = rot(th_p, jt.axis);
        k.theta[c] = th_p + jt.mount_angle;
        k.origin[c] = (p < 0 ? Vector2::Zero() : k.origin[p]) + D;
        k.J[c] = parent_J(k, p) + perp(D) * t_p.transpose();
        k.J[c].col(j) += w;
      }
    }
    return k;
  }

  // Directional derivatives for a fixed tangent direction v: per link the
  // scalar thetad = t_l . v, the velocity od = J_l v, and G = d/dq (J_l v).
  struct Dir {
    std::vector<Scalar> thetad;
    std::vector<Vector2> od;
    std::vector<MatrixX> G;
  };

  Dir directional(const VectorX& q, const VectorX& v, const Kin& k) const {
    const size_t nl = spec.links.size();
    Dir d{std::vector<Scalar>(nl, 0.0), std::vector<Vector2>(nl, Vector2::Zero()),
          std::vector<MatrixX>(nl, MatrixX::Zero(2, nq))};
    for (Index j = 0; j < nj; ++j) {
      const JointSpec& jt = spec.joints[static_cast<size_t>(j)];
      const int p = jt.parent, c = jt.child;
      const Scalar th_p = p < 0 ? 0.0 : k.theta[p];
      const Scalar thd_p = p < 0 ? 0.0 : d.thetad[p];
      const VectorX& t_p = rotation_indicator(p);
      d.thetad[c] = rotation_indicator(c).dot(v);
      if (jt.type == JointType::Revolute) {
        const Vector2 A = rot(th_p, jt.anchor);
        const Vector2 Ad = perp(A) * thd_p;
        d.od[c] = (p < 0 ? Vector2::Zero() : d.od[p]) + Ad;
        d.G[c] = parent_G(d, p) + perp(Ad) * t_p.transpose();
      } else {
        const Vector2 D = rot(th_p, jt.anchor + q[j] * jt.axis);
        const Vector2 w = rot(th_p, jt.axis);
        const Vector2 Dd = perp(D) * thd_p + w * v[j];
        d.od[c] = (p < 0 ? Vector2::Zero() : d.od[p]) + Dd;
        d.G[c] = parent_G(d, p) + perp(Dd) * t_p.transpose();
        d.G[c].col(j) += perp(w) * thd_p;
      }
    }
    return d;
  }

  // ---- anchor points ----------------------------------------------------

  struct Point {
    Vector2 P;
    MatrixX J;
  };

  Point point_on(const Kin& k, int link, const Vector2& r) const {
    if (link < 0) return {r, MatrixX::Zero(2, nq)};
    const Vector2 B = rot(k.theta[link], r);
    Point pe{k.origin[link] + B, k.J[link]};
    pe.J += perp(B) * rot_ind[link].transpose();
    return pe;
  }

  struct PointDir {
    Vector2 Pd;
    MatrixX G;
  };

  PointDir point_dir(const Kin& k, const Dir& d, int link, const Vector2& r) const {
    if (link < 0) return {Vector2::Zero(), MatrixX::Zero(2, nq)};
    const Vector2 B = rot(k.theta[link], r);
    const Vector2 Bd = perp(B) * d.thetad[link];
    return {d.od[link] + Bd, d.G[link] + perp(Bd) * rot_ind[link].transpose()};
  }

  Scalar theta_of(const Kin& k, int link) const { return link < 0 ? 0.0 : k.theta[link]; }

  const VectorX& rotation_indicator(int link) const {
    if (link < 0) return zero_ind;
    return rot_ind[static_cast<size_t>(link)];
  }

  MatrixX parent_J(const Kin& k, int p) const { return p < 0 ? MatrixX::Zero(2, nq) : k.J[p]; }
  MatrixX parent_G(const Dir& d, int p) const { return p < 0 ? MatrixX::Zero(2, nq) : d.G[p]; }

  VectorX zero_ind;

  // ---- constraint maps --------------------------------------------------

  VectorX phi(const VectorX& q) const {
    check_q(q);
    const Kin k = kinematics(q);
    VectorX f(ne);
    for (Index i = 0; i < ncl; ++i) {
      const ClosureSpec& cl = spec.closures[static_cast<size_t>(i)];
      const Index c = nj + i;
      const Point A = point_on(k, cl.link_a, cl.anchor_a);
      const Point B = point_on(k, cl.link_b, cl.anchor_b);
      const Scalar th_a = theta_of(k, cl.link_a), th_b = theta_of(k, cl.link_b);
      if (cl.type == JointType::Revolute) {
        f.segment<2>(3 * i) = A.P - B.P;
        f[3 * i + 2] = th_a + cl.mount_angle + q[c] - th_b;
      } else {
        f.segment<2>(3 * i) = A.P + q[c] * rot(th_a, cl.axis) - B.P;
        f[3 * i + 2] = th_a + cl.mount_angle - th_b;
      }
    }
    return f;
  }

  MatrixX phi_jac(const VectorX& q) const {
    check_q(q);
    const Kin k = kinematics(q);
    MatrixX jac = MatrixX::Zero(ne, nq);
    for (Index i = 0; i < ncl; ++i) {
      const ClosureSpec& cl = spec.closures[static_cast<size_t>(i)];
      const Index c = nj + i;
      const Point A = point_on(k, cl.link_a, cl.anchor_a);
      const Point B = point_on(k, cl.link_b, cl.anchor_b);
      jac.middleRows<2>(3 * i) = A.J - B.J;
      jac.row(3 * i + 2) =
          (rotation_indicator(cl.link_a) - rotation_indicator(cl.link_b)).transpose();
      if (cl.type == JointType::Revolute) {
        jac(3 * i + 2, c) += 1.0;
      } else {
        const Vector2 w = rot(theta_of(k, cl.link_a), cl.axis);
        jac.middleRows<2>(3 * i) +=
            q[c] * perp(w) * rotation_indicator(cl.link_a).transpose();
        jac.block<2, 1>(3 * i, c) += w;
      }
    }
    return jac;
  }

  MatrixX phi_hess_action(const VectorX& q, const VectorX& v) const {
    check_q(q);
    const Kin k = kinematics(q);
    const Dir d = directional(q, v, k);
    MatrixX h = MatrixX::Zero(ne, nq);
    for (Index i = 0; i < ncl; ++i) {
      const ClosureSpec& cl = spec.closures[static_cast<size_t>(i)];
      const Index c = nj + i;
      const PointDir A = point_dir(k, d, cl.link_a, cl.anchor_a);
      const PointDir B = point_dir(k, d, cl.link_b, cl.anchor_b);
      h.middleRows<2>(3 * i) = A.G - B.G;
      if (cl.type == JointType::Prismatic) {
        const Scalar th_a = theta_of(k, cl.link_a);
        const Scalar thd_a = cl.link_a < 0 ? 0.0 : d.thetad[cl.link_a];
        const Vector2 w = rot(th_a, cl.axis);
        const VectorX& t_a = rotation_indicator(cl.link_a);
        h.block<2, 1>(3 * i, c) += perp(w) * thd_a;
        h.middleRows<2>(3 * i) += (perp(w) * v[c] - q[c] * w * thd_a) * t_a.transpose();
      }
    }
    return h;
  }

  // ---- dynamics terms ---------------------------------------------------

  MatrixX mass(const VectorX& q) const {
    check_q(q);
    const Kin k = kinematics(q);
    MatrixX M = MatrixX::Zero(nq, nq);
    for (size_t l = 0; l < spec.links.size(); ++l) {
      const LinkSpec& lk = spec.links[l];
      const Point c = point_on(k, static_cast<int>(l), lk.com);
      M += lk.mass * c.J.transpose() * c.J + lk.inertia * rot_ind[l] * rot_ind[l].transpose();
    }
    return M;
  }

  VectorX forces(const VectorX& q, const VectorX& qd, const Action& u) const {
    check_q(q);
    const Kin k = kinematics(q);
    const Dir d = directional(q, qd, k);
    VectorX Q = VectorX::Zero(nq);
    for (size_t l = 0; l < spec.links.size(); ++l) {
      const LinkSpec& lk = spec.links[l];
      const Point c = point_on(k, static_cast<int>(l), lk.com);
      // gravity and velocity bias: Q -= m J^T (dJ/dt qd), Q += m J^T g
      const PointDir cd = point_dir(k, d, static_cast<int>(l), lk.com);
      Q += lk.mass * c.J.transpose() * (spec.gravity - cd.G * qd);
    }
    apply_spring_forces(k, q, Q);
    for (size_t i = 0; i < spec.actuated.size(); ++i) {
      if (std::abs(u[static_cast<Index>(i)]) > spec.tau_max[static_cast<Index>(i)] + 1e-12)
        throw std::invalid_argument("applied_forces: torque exceeds tau_max");
      Q[spec.actuated[i]] += u[static_cast<Index>(i)];
    }
    return Q;
  }

  void apply_spring_forces(const Kin& k, const VectorX& q, VectorX& Q) const {
    for (const SpringSpec& s : spec.springs) {
      if (s.type == SpringSpec::Type::Torsional) {
        Q[s.coord] -= s.stiffness * (q[s.coord] - s.rest);
      } else {
        const Point A = point_on(k, s.link_a, s.point_a);
        const Point B = point_on(k, s.link_b, s.point_b);
        const Vector2 delta = A.P - B.P;
        const Scalar len = delta.norm();
        if (len < 1e-12) continue;  // direction undefined at zero length
        const Vector2 f = -s.stiffness * (len - s.rest) / len * delta;
        Q += (A.J - B.J).transpose() * f;
      }
    }
  }

  Scalar energy(const VectorX& x) const {
    const auto q = x.head(nq);
    const auto qd = x.tail(nq);
    const Kin k = kinematics(q);
    Scalar E = 0.5 * qd.dot(mass(q) * qd);
    for (size_t l = 0; l < spec.links.size(); ++l) {
      const LinkSpec& lk = spec.links[l];
      E -= lk.mass * spec.gravity.dot(point_on(k, static_cast<int>(l), lk.com).P);
    }
    for (const SpringSpec& s : spec.springs) {
      if (s.type == SpringSpec::Type::Torsional) {
        const Scalar e = q[s.coord] - s.rest;
        E += 0.5 * s.stiffness * e * e;
      } else {
        const Scalar len =
            (point_on(k, s.link_a, s.point_a).P - point_on(k, s.link_b, s.point_b).P).norm();
        E += 0.5 * s.stiffness * (len - s.rest) * (len - s.rest);
      }
    }
    return E;
  }

  void check_q(const VectorX& q) const {
    if (q.size() != nq) throw std::invalid_argument("linkage: configuration dimension mismatch");
  }
};

PlanarLinkage::PlanarLinkage(LinkageSpec spec) {
  auto core = std::make_shared<Core>();
  core->spec = std::move(spec);
  const LinkageSpec& s = core->spec;
  core->nj = static_cast<Index>(s.joints.size());
  core->ncl = static_cast<Index>(s.closures.size());
  core->nq = core->nj + core->ncl;
  core->ne = 3 * core->ncl;
  core->zero_ind = VectorX::Zero(core->nq);

  const int nl = static_cast<int>(s.links.size());
  std::vector<bool> driven(static_cast<size_t>(nl), false);
  core->rot_ind.assign(static_cast<size_t>(nl), VectorX::Zero(core->nq));
  for (Index j = 0; j < core->nj; ++j) {
    const JointSpec& jt = s.joints[static_cast<size_t>(j)];
    if (jt.child < 0 || jt.child >= nl || driven[static_cast<size_t>(jt.child)])
      throw std::invalid_argument("linkage: every link needs exactly one tree joint");
    if (jt.parent >= nl || (jt.parent >= 0 && !driven[static_cast<size_t>(jt.parent)]))
      throw std::invalid_argument("linkage: joints must be listed parents-first");
    driven[static_cast<size_t>(jt.child)] = true;
    core->rot_ind[static_cast<size_t>(jt.child)] =
        jt.parent < 0 ? VectorX::Zero(core->nq) : core->rot_ind[static_cast<size_t>(jt.parent)];
    if (jt.type == JointType::Revolute) core->rot_ind[static_cast<size_t>(jt.child)][j] = 1.0;
  }
  for (int l = 0; l < nl; ++l)
    if (!driven[static_cast<size_t>(l)])
      throw std::invalid_argument("linkage: link without a driving joint");
  for (const LinkSpec& lk : s.links)
    if (lk.mass <= 0.0 || lk.inertia <= 0.0)
      throw std::invalid_argument("linkage: masses and inertias must be strictly positive");
  for (const ClosureSpec& cl : s.closures)
    if (cl.link_a < 0 || cl.link_a >= nl || cl.link_b < -1 || cl.link_b >= nl ||
        cl.link_a == cl.link_b)
      throw std::invalid_argument("linkage: bad closure link indices");
  const Index d_c = core->nq - core->ne;
  if (d_c < 1) throw std::invalid_argument("linkage: over-constrained (d_C < 1)");
  if (static_cast<Index>(s.actuated.size()) > d_c)
    throw std::invalid_argument("linkage: more actuators than C-space dimensions");
  if (core->spec.tau_max.size() != static_cast<Index>(s.actuated.size()))
    throw std::invalid_argument("linkage: tau_max size must match actuated joints");
  for (int a : s.actuated)
    if (a < 0 || a >= core->nq) throw std::invalid_argument("linkage: actuated index out of range");

  core_ = std::move(core);
}

std::string PlanarLinkage::name() const { return core_->spec.name; }
Index PlanarLinkage::nq() const { return core_->nq; }
Index PlanarLinkage::nu() const { return static_cast<Index>(core_->spec.actuated.size()); }
VectorX PlanarLinkage::tau_max() const { return core_->spec.tau_max; }
const LinkageSpec& PlanarLinkage::spec() const { return core_->spec; }

ConstraintSystem PlanarLinkage::constraint_system() const {
  ConstraintSystem cs;
  cs.nq = core_->nq;
  cs.ne = core_->ne;
  auto core = core_;
  cs.phi = [core](const VectorX& q) { return core->phi(q); };
  cs.phi_jac = [core](const VectorX& q) { return core->phi_jac(q); };
  cs.phi_hess_action = [core](const VectorX& q, const VectorX& v) {
    return core->phi_hess_action(q, v);
  };
  return cs;
}

MatrixX PlanarLinkage::mass_matrix(const VectorX& q) const { return core_->mass(q); }

VectorX PlanarLinkage::applied_forces(const VectorX& q, const VectorX& qdot,
                                      const Action& u) const {
  return core_->forces(q, qdot, u);
}

Scalar PlanarLinkage::total_energy(const VectorX& x) const { return core_->energy(x); }

std::vector<Segment> PlanarLinkage::link_segments(const VectorX& q) const {
  const Core::Kin k = core_->kinematics(q);
  std::vector<Segment> segs;
  segs.reserve(core_->spec.links.size());
  for (size_t l = 0; l < core_->spec.links.size(); ++l) {
    const Vector2 tip =
        k.origin[l] + rot(k.theta[l], Vector2(core_->spec.links[l].length, 0.0));
    segs.push_back({k.origin[l], tip});
  }
  return segs;
}

}  // namespace kinoatlas
