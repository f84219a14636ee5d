#include "kinoatlas/chart.hpp"

#include <Eigen/LU>

namespace kinoatlas {

VectorX chart_lift(const ConstraintSystem& cs, const Chart& c, const VectorX& y, Scalar eta,
                   int max_iters) {
  const Index n = cs.dim_ambient();
  const Index ne2 = 2 * cs.ne;
  VectorX x = chart_point(c, y);
  VectorX r(n);
  for (int it = 0; it <= max_iters; ++it) {
    r.head(ne2) = eval_F(cs, x);
    r.tail(cs.dim_x()) = c.basis.transpose() * (x - c.center) - y;
    if (r.lpNorm<Eigen::Infinity>() <= eta) return x;
    if (it == max_iters) break;
    MatrixX J(n, n);
    J.topRows(ne2) = eval_F_jacobian(cs, x);
    J.bottomRows(cs.dim_x()) = c.basis.transpose();
    Eigen::PartialPivLU<MatrixX> lu(J);
    x -= lu.solve(r);
    if (!x.allFinite()) break;
  }
  throw LiftDivergedError("chart_lift: Newton iteration did not converge");
}

bool in_polytope(const Chart& c, const VectorX& y) {
  if (y.norm() > c.radius) return false;
  for (const Cut& k : c.cuts)
    if (y.dot(k.y) - 0.5 * k.y.squaredNorm() > 0.0) return false;
  return true;
}

bool needs_new_chart(const Chart& c, const VectorX& x_prev, const VectorX& x_next,
                     const VectorX& y_prev, const VectorX& y_next, const ChartSpawnParams& p) {
  if ((x_next - chart_point(c, y_next)).norm() > p.epsilon) return true;
  const Scalar dx = (x_next - x_prev).norm();
  if (dx > 0.0 && (y_next - y_prev).norm() / dx < p.cos_alpha) return true;
  return y_next.norm() > p.rho;
}

}  // namespace kinoatlas
