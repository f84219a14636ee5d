#include "kinoatlas/world.hpp"

#include <algorithm>
#include <cmath>

namespace kinoatlas {

Scalar point_segment_distance(const Vector2& p, const Vector2& a, const Vector2& b) {
  const Vector2 ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const Scalar t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

namespace {
int orientation(const Vector2& a, const Vector2& b, const Vector2& c) {
  const Scalar v = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

bool on_segment(const Vector2& a, const Vector2& b, const Vector2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Vector2& a1, const Vector2& b1, const Vector2& a2,
                        const Vector2& b2) {
  const int o1 = orientation(a1, b1, a2);
  const int o2 = orientation(a1, b1, b2);
  const int o3 = orientation(a2, b2, a1);
  const int o4 = orientation(a2, b2, b1);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a1, b1, a2)) return true;
  if (o2 == 0 && on_segment(a1, b1, b2)) return true;
  if (o3 == 0 && on_segment(a2, b2, a1)) return true;
  if (o4 == 0 && on_segment(a2, b2, b1)) return true;
  return false;
}
}  // namespace

Scalar segment_segment_distance(const Vector2& a1, const Vector2& b1, const Vector2& a2,
                                const Vector2& b2) {
  if (segments_intersect(a1, b1, a2, b2)) return 0.0;
  return std::min(std::min(point_segment_distance(a1, a2, b2), point_segment_distance(b1, a2, b2)),
                  std::min(point_segment_distance(a2, a1, b1), point_segment_distance(b2, a1, b1)));
}

bool segment_box_intersects(const Vector2& a, const Vector2& b, const Vector2& lo,
                            const Vector2& hi) {
  // slab test on p(t) = a + t (b - a), t in [0, 1]
  Scalar tmin = 0.0, tmax = 1.0;
  const Vector2 d = b - a;
  for (int axis = 0; axis < 2; ++axis) {
    if (d[axis] == 0.0) {
      if (a[axis] < lo[axis] || a[axis] > hi[axis]) return false;
    } else {
      Scalar t1 = (lo[axis] - a[axis]) / d[axis];
      Scalar t2 = (hi[axis] - a[axis]) / d[axis];
      if (t1 > t2) std::swap(t1, t2);
      tmin = std::max(tmin, t1);
      tmax = std::min(tmax, t2);
      if (tmin > tmax) return false;
    }
  }
  return true;
}

bool collision(const World& w, const Mechanism& mech, const VectorX& x) {
  const std::vector<Segment> links = mech.link_segments(conf(x));
  for (const Segment& s : links) {
    for (const CircleObstacle& c : w.circles)
      if (point_segment_distance(c.center, s.a, s.b) <= c.radius) return true;
    for (const SegmentObstacle& o : w.segments)
      if (segment_segment_distance(s.a, s.b, o.a, o.b) <= o.radius) return true;
    for (const BoxObstacle& o : w.boxes)
      if (segment_box_intersects(s.a, s.b, o.lo, o.hi)) return true;
  }
  for (const auto& [i, j] : w.self_collision_pairs) {
    if (i < 0 || j < 0 || i >= static_cast<int>(links.size()) ||
        j >= static_cast<int>(links.size()))
      continue;
    const Segment& si = links[static_cast<size_t>(i)];
    const Segment& sj = links[static_cast<size_t>(j)];
    if (segment_segment_distance(si.a, si.b, sj.a, sj.b) <= 1e-12) return true;
  }
  return false;
}

bool out_of_workspace(const World& w, const Mechanism& mech, const VectorX& x) {
  const auto q = conf(x);
  for (const JointLimit& jl : w.joint_limits) {
    if (jl.coord < 0 || jl.coord >= q.size()) continue;
    if (q[jl.coord] <= jl.lo || q[jl.coord] >= jl.hi) return true;
  }
  if (w.workspace) {
    for (const Segment& s : mech.link_segments(q)) {
      for (const Vector2& p : {s.a, s.b}) {
        if (p.x() < w.workspace->lo.x() || p.x() > w.workspace->hi.x() ||
            p.y() < w.workspace->lo.y() || p.y() > w.workspace->hi.y())
          return true;
      }
    }
  }
  return false;
}

}  // namespace kinoatlas
