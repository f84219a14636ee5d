#pragma once

#include <vector>

#include "kinoatlas/constraint.hpp"
#include "kinoatlas/types.hpp"

namespace kinoatlas {

/// Half-plane bound on a chart's parameter set, generated by the projection
/// y_k of a neighboring chart center: y is kept iff y^T y_k <= ||y_k||^2 / 2.
struct Cut {
  VectorX y;
  int neighbor = -1;
};

/// Tangent-space chart of the state manifold: local coordinates are
/// y = U^T (x - center), the inverse map is a Newton solve. The valid
/// parameter set P is the ball of radius `radius` intersected with the
/// half-planes of `cuts`.
struct Chart {
  int id = -1;
  VectorX center;  // ambient, manifold-consistent
  MatrixX basis;   // 2 n_q x d_X, orthonormal columns spanning ker F_x(center)
  Scalar radius = 1.0;
  std::vector<Cut> cuts;
};

inline VectorX chart_coords(const Chart& c, const VectorX& x) {
  return c.basis.transpose() * (x - c.center);
}

/// Ambient point of the tangent plane at parameters y (not lifted to the
/// manifold).
inline VectorX chart_point(const Chart& c, const VectorX& y) {
  return c.center + c.basis * y;
}

/// Inverse chart map: Newton-Raphson on {F(x) = 0, U^T (x - center) = y}
/// starting from the tangent-plane point. Throws LiftDivergedError when the
/// iteration does not reach ||residual||_inf <= eta within max_iters; callers
/// treat that as "y not covered by this chart".
VectorX chart_lift(const ConstraintSystem& cs, const Chart& c, const VectorX& y, Scalar eta = 1e-8,
                   int max_iters = 50);

bool in_polytope(const Chart& c, const VectorX& y);

struct ChartSpawnParams {
  Scalar epsilon = 0.1;    // max tangent-plane/manifold distance
  Scalar cos_alpha = 0.1;  // curvature bound on ||dy|| / ||dx||
  Scalar rho = 0.5;        // parameter radius forcing chart turnover
};

/// Chart-spawn test for one integration step x_prev -> x_next with chart
/// parameters y_prev -> y_next: fires when the tangent plane strays from the
/// manifold, when the step bends too sharply, or when the parameters outgrow
/// rho. The curvature ratio is skipped when x_next == x_prev.
bool needs_new_chart(const Chart& c, const VectorX& x_prev, const VectorX& x_next,
                     const VectorX& y_prev, const VectorX& y_next, const ChartSpawnParams& p);

}  // namespace kinoatlas
