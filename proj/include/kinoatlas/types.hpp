#pragma once

#include <Eigen/Dense>

namespace kinoatlas {

using Scalar = double;
using Index = Eigen::Index;
using VectorX = Eigen::VectorXd;
using MatrixX = Eigen::MatrixXd;
using Vector2 = Eigen::Vector2d;

/// Ambient mechanical states are stored stacked, x = (q, qdot) in R^{2 n_q}.
/// `conf(x)` and `vel(x)` are views into the two halves.
inline auto conf(const VectorX& x) { return x.head(x.size() / 2); }
inline auto vel(const VectorX& x) { return x.tail(x.size() / 2); }
inline auto conf(VectorX& x) { return x.head(x.size() / 2); }
inline auto vel(VectorX& x) { return x.tail(x.size() / 2); }

inline VectorX stack_state(const VectorX& q, const VectorX& qdot) {
  VectorX x(q.size() + qdot.size());
  x << q, qdot;
  return x;
}

/// Rotate v by 90 degrees counterclockwise (planar cross product with +z).
inline Vector2 perp(const Vector2& v) { return Vector2(-v.y(), v.x()); }

}  // namespace kinoatlas
