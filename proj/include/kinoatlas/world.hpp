#pragma once

#include <optional>
#include <vector>

#include "kinoatlas/mechanism.hpp"

namespace kinoatlas {

// ---- planar geometry queries (boundary contact counts as contact) --------

Scalar point_segment_distance(const Vector2& p, const Vector2& a, const Vector2& b);
Scalar segment_segment_distance(const Vector2& a1, const Vector2& b1, const Vector2& a2,
                                const Vector2& b2);
bool segment_box_intersects(const Vector2& a, const Vector2& b, const Vector2& lo,
                            const Vector2& hi);

struct CircleObstacle {
  Vector2 center{0.0, 0.0};
  Scalar radius = 0.0;
};

/// Segment obstacle, optionally inflated into a capsule of the given radius.
struct SegmentObstacle {
  Vector2 a{0.0, 0.0};
  Vector2 b{0.0, 0.0};
  Scalar radius = 0.0;
};

struct BoxObstacle {
  Vector2 lo{0.0, 0.0};
  Vector2 hi{0.0, 0.0};
};

struct JointLimit {
  int coord = 0;
  Scalar lo = 0.0;
  Scalar hi = 0.0;
};

struct WorkspaceBox {
  Vector2 lo{0.0, 0.0};
  Vector2 hi{0.0, 0.0};
};

/// Planar workspace: obstacles tested against the mechanism's link segments,
/// axis-aligned bounds on link endpoints, and closed per-coordinate limits.
/// Immutable after load; queries are pure.
struct World {
  std::vector<CircleObstacle> circles;
  std::vector<SegmentObstacle> segments;
  std::vector<BoxObstacle> boxes;
  std::optional<WorkspaceBox> workspace;
  std::vector<JointLimit> joint_limits;
  std::vector<std::pair<int, int>> self_collision_pairs;
};

/// True iff any link segment touches any obstacle, or any link pair marked
/// self-colliding intersects. Checked only at integration steps (the tangent
/// step bound delta keeps states dense); there is no continuous checking.
bool collision(const World& w, const Mechanism& mech, const VectorX& x);

/// True iff any declared coordinate limit is reached or crossed, or any link
/// endpoint leaves the workspace box.
bool out_of_workspace(const World& w, const Mechanism& mech, const VectorX& x);

}  // namespace kinoatlas
