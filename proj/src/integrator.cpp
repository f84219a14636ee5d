#include "kinoatlas/integrator.hpp"

#include <cmath>

#include <Eigen/LU>

namespace kinoatlas {

BroydenResult broyden_solve(const std::function<VectorX(const VectorX&)>& residual,
                            const VectorX& x_guess, const MatrixX& approx_jacobian, Scalar tol,
                            int max_iters) {
  Eigen::PartialPivLU<MatrixX> lu(approx_jacobian);
  MatrixX H = lu.inverse();  // running inverse-Jacobian estimate
  if (!H.allFinite()) throw StepDivergedError("broyden: approximate Jacobian not invertible");

  VectorX x = x_guess;
  VectorX r = residual(x);
  if (!r.allFinite()) throw StepDivergedError("broyden: residual not finite at guess");
  for (int it = 1; it <= max_iters; ++it) {
    if (r.lpNorm<Eigen::Infinity>() <= tol) return {x, it - 1};
    const VectorX dx = -H * r;
    x += dx;
    const VectorX r_new = residual(x);
    if (!r_new.allFinite()) throw StepDivergedError("broyden: residual not finite");
    const VectorX dr = r_new - r;
    const VectorX Hdr = H * dr;
    const Scalar denom = dx.dot(Hdr);
    if (std::abs(denom) < 1e-300) throw StepDivergedError("broyden: update breakdown");
    H += (dx - Hdr) * (dx.transpose() * H) / denom;
    r = r_new;
  }
  if (r.lpNorm<Eigen::Infinity>() <= tol) return {x, max_iters};
  throw StepDivergedError("broyden: iteration cap reached");
}

StepResult step(const ConstraintSystem& cs, const Mechanism& mech, const Chart& chart,
                const VectorX& x_k, const VectorX& y_k, const Action& u, Scalar h,
                const IntegratorConfig& cfg) {
  const Index ne2 = 2 * cs.ne;
  const VectorX g_k = forward_dynamics(mech, cs, x_k, u);

  auto residual = [&](const VectorX& x) -> VectorX {
    VectorX r(cs.dim_ambient());
    r.head(ne2) = eval_F(cs, x);
    const VectorX g = forward_dynamics(mech, cs, x, u);
    r.tail(cs.dim_x()) =
        chart.basis.transpose() * (x - 0.5 * h * (g_k + g) - chart.center) - y_k;
    return r;
  };

  MatrixX J(cs.dim_ambient(), cs.dim_ambient());
  J.topRows(ne2) = eval_F_jacobian(cs, x_k);
  J.bottomRows(cs.dim_x()) = chart.basis.transpose();

  const VectorX predictor = x_k + h * g_k;
  const BroydenResult sol = broyden_solve(residual, predictor, J, cfg.solve_tol,
                                          cfg.broyden_max_iters);

  StepResult out;
  out.x_next = sol.x;
  out.y_next = chart_coords(chart, sol.x);
  out.h_used = h;
  out.dy_norm = (out.y_next - y_k).norm();
  return out;
}

Scalar adapt_step(const StepResult& prev, const IntegratorConfig& cfg) {
  const Scalar sign = prev.h_used < 0.0 ? -1.0 : 1.0;
  Scalar mag;
  if (prev.dy_norm == 0.0) {
    mag = cfg.h_max;  // equilibrium: nothing moves in parameter space
  } else {
    mag = std::abs(prev.h_used) * cfg.delta / prev.dy_norm;
    if (mag < cfg.h_min)
      throw StepTooSmallError("adapt_step: required step below h_min");
    mag = std::min(mag, cfg.h_max);
  }
  return sign * mag;
}

StepResult advance(const ConstraintSystem& cs, const Mechanism& mech, const Chart& chart,
                   const VectorX& x_k, const VectorX& y_k, const Action& u, Scalar* h_inout,
                   const IntegratorConfig& cfg) {
  Scalar h = *h_inout;
  for (int attempt = 0; attempt < 64; ++attempt) {
    StepResult r;
    try {
      r = step(cs, mech, chart, x_k, y_k, u, h, cfg);
    } catch (const StepDivergedError&) {
      h *= 0.5;
      if (std::abs(h) < cfg.h_min)
        throw StepTooSmallError("advance: step diverges above h_min");
      continue;
    }
    if (r.dy_norm <= cfg.delta) {
      *h_inout = adapt_step(r, cfg);
      return r;
    }
    h = adapt_step(r, cfg);  // shrinks: dy_norm > delta
  }
  throw StepTooSmallError("advance: could not satisfy the tangent step bound");
}

}  // namespace kinoatlas
