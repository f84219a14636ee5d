#include "kinoatlas/models.hpp"

#include <cmath>

namespace kinoatlas {

namespace {

LinkSpec rod(std::string name, Scalar mass, Scalar length) {
  LinkSpec l;
  l.name = std::move(name);
  l.mass = mass;
  l.inertia = mass * length * length / 12.0;
  l.length = length;
  l.com = Vector2(0.5 * length, 0.0);
  return l;
}

// four-bar geometry: unit moving links, ground pivots 0.8 m apart
constexpr Scalar kFourBarSpan = 0.8;

// five-bar geometry
constexpr Scalar kFiveBarHalfSpan = 0.25;  // base pivots at +-0.25
constexpr Scalar kFiveBarUpper = 0.5;
constexpr Scalar kFiveBarLower = 0.7;

Scalar angle_of(const Vector2& v) { return std::atan2(v.y(), v.x()); }

}  // namespace

std::shared_ptr<PointOnCircle> make_circle_pendulum(Scalar torque_max) {
  PointOnCircle::Params p;
  p.mass = 1.0;
  p.length = 1.0;
  p.torque_max = torque_max;
  return std::make_shared<PointOnCircle>(p);
}

std::shared_ptr<PlanarLinkage> make_four_bar(Scalar torque_max) {
  LinkageSpec s;
  s.name = "four_bar";
  s.links = {rod("crank", 1.0, 1.0), rod("coupler", 1.0, 1.0), rod("rocker", 1.0, 1.0)};

  JointSpec j0;  // ground -> crank at the origin
  j0.parent = -1;
  j0.child = 0;
  j0.anchor = Vector2(0.0, 0.0);
  JointSpec j1;  // crank tip -> coupler
  j1.parent = 0;
  j1.child = 1;
  j1.anchor = Vector2(1.0, 0.0);
  JointSpec j2;  // ground -> rocker at the far pivot
  j2.parent = -1;
  j2.child = 2;
  j2.anchor = Vector2(kFourBarSpan, 0.0);
  s.joints = {j0, j1, j2};

  ClosureSpec cl;  // coupler tip pinned to rocker tip
  cl.link_a = 1;
  cl.anchor_a = Vector2(1.0, 0.0);
  cl.link_b = 2;
  cl.anchor_b = Vector2(1.0, 0.0);
  s.closures = {cl};

  s.actuated = {0};
  s.tau_max = VectorX::Constant(1, torque_max);
  return std::make_shared<PlanarLinkage>(std::move(s));
}

std::shared_ptr<PlanarLinkage> make_five_bar(Scalar torque_max) {
  LinkageSpec s;
  s.name = "five_bar";
  s.links = {rod("upper_left", 0.4, kFiveBarUpper), rod("lower_left", 0.6, kFiveBarLower),
             rod("upper_right", 0.4, kFiveBarUpper), rod("lower_right", 0.6, kFiveBarLower)};
  // the payload rides on the effector: bias the distal COMs toward the tips
  s.links[1].com = Vector2(0.6 * kFiveBarLower, 0.0);
  s.links[3].com = Vector2(0.6 * kFiveBarLower, 0.0);

  JointSpec j0;  // ground -> upper_left
  j0.parent = -1;
  j0.child = 0;
  j0.anchor = Vector2(-kFiveBarHalfSpan, 0.0);
  JointSpec j1;  // elbow left
  j1.parent = 0;
  j1.child = 1;
  j1.anchor = Vector2(kFiveBarUpper, 0.0);
  JointSpec j2;  // ground -> upper_right
  j2.parent = -1;
  j2.child = 2;
  j2.anchor = Vector2(kFiveBarHalfSpan, 0.0);
  JointSpec j3;  // elbow right
  j3.parent = 2;
  j3.child = 3;
  j3.anchor = Vector2(kFiveBarUpper, 0.0);
  s.joints = {j0, j1, j2, j3};

  ClosureSpec cl;  // effector joint between the distal tips
  cl.link_a = 1;
  cl.anchor_a = Vector2(kFiveBarLower, 0.0);
  cl.link_b = 3;
  cl.anchor_b = Vector2(kFiveBarLower, 0.0);
  s.closures = {cl};

  s.actuated = {0, 2};
  s.tau_max = VectorX::Constant(2, torque_max);

  SpringSpec sp;  // compliance between the distal links
  sp.type = SpringSpec::Type::Linear;
  sp.link_a = 1;
  sp.point_a = Vector2(0.5 * kFiveBarLower, 0.0);
  sp.link_b = 3;
  sp.point_b = Vector2(0.5 * kFiveBarLower, 0.0);
  sp.stiffness = 10.0;
  sp.rest = 0.35;
  s.springs = {sp};
  return std::make_shared<PlanarLinkage>(std::move(s));
}

VectorX four_bar_guess(bool crank_up) {
  // assembled poses on one branch of the configuration curve, obtained by
  // numerical continuation of the loop closure while sweeping the crank from
  // hanging (-pi/2) to raised (+pi/2); the raised coordinates are *not* the
  // principal atan2 values (angles stay unwrapped along the branch)
  VectorX q(4);
  if (crank_up)
    q << 1.5707963268, 2.9404422068, 3.1214286580, -1.3898098755;
  else
    q << -1.5707963268, 1.5909603223, -1.3696458800, -1.3898098755;
  return q;
}

VectorX five_bar_guess(Scalar effector_x) {
  const Vector2 target(effector_x, -1.0);
  auto arm = [&](Scalar base_x, Scalar side) -> Vector2 {  // (shoulder, elbow-relative)
    const Vector2 base(base_x, 0.0);
    const Vector2 r = target - base;
    const Scalar dist = r.norm();
    Scalar cb = (kFiveBarUpper * kFiveBarUpper + dist * dist - kFiveBarLower * kFiveBarLower) /
                (2.0 * kFiveBarUpper * dist);
    cb = std::clamp(cb, -1.0, 1.0);
    const Scalar shoulder = angle_of(r) + side * std::acos(cb);
    const Vector2 elbow = base + kFiveBarUpper * Vector2(std::cos(shoulder), std::sin(shoulder));
    return Vector2(shoulder, angle_of(target - elbow) - shoulder);
  };
  const Vector2 left = arm(-kFiveBarHalfSpan, -1.0);  // elbows bow outward
  const Vector2 right = arm(kFiveBarHalfSpan, 1.0);

  VectorX q(5);
  q[0] = left[0];
  q[1] = left[1];
  q[2] = right[0];
  q[3] = right[1];
  q[4] = (right[0] + right[1]) - (left[0] + left[1]);  // theta_B2 - theta_A2
  return q;
}

}  // namespace kinoatlas
