#pragma once

#include "kinoatlas/chart.hpp"
#include "kinoatlas/mechanism.hpp"

namespace kinoatlas {

struct IntegratorConfig {
  Scalar delta = 0.05;       // tangent-space step bound (state units)
  Scalar h_init = 1e-3;      // s
  Scalar h_min = 1e-6;       // s
  Scalar h_max = 5e-2;       // s
  Scalar solve_tol = 1e-11;  // Broyden residual tolerance (inf norm)
  int broyden_max_iters = 50;
};

struct StepResult {
  VectorX x_next;
  VectorX y_next;
  Scalar h_used = 0.0;  // signed
  Scalar dy_norm = 0.0; // ||y_next - y_prev||
};

struct BroydenResult {
  VectorX x;
  int iterations = 0;
};

/// Quasi-Newton root finder with "good Broyden" rank-1 updates of the inverse
/// of a fixed approximate Jacobian (no Jacobian evaluations during the
/// iteration). Converges when ||residual||_inf <= tol, otherwise throws
/// StepDivergedError.
BroydenResult broyden_solve(const std::function<VectorX(const VectorX&)>& residual,
                            const VectorX& x_guess, const MatrixX& approx_jacobian, Scalar tol,
                            int max_iters);

/// One implicit trapezoidal step of the state-space vector field in the
/// coordinates of `chart`: solves
///   F(x_next) = 0
///   U^T (x_next - (h/2)(g(x_k,u) + g(x_next,u)) - x_c) - y_k = 0
/// by Broyden iteration from the explicit-Euler predictor, with the fixed
/// approximate Jacobian [F_x(x_k); U^T]. h < 0 integrates backward in time.
/// Throws StepDivergedError on non-convergence (callers shrink h) and
/// propagates SingularityError from the dynamics.
StepResult step(const ConstraintSystem& cs, const Mechanism& mech, const Chart& chart,
                const VectorX& x_k, const VectorX& y_k, const Action& u, Scalar h,
                const IntegratorConfig& cfg);

/// Proportional step-size rule: scales |h_used| by delta/||dy||, clamped to
/// [h_min, h_max], sign preserved. Throws StepTooSmallError when satisfying
/// the bound would need |h| < h_min.
Scalar adapt_step(const StepResult& prev, const IntegratorConfig& cfg);

/// One *accepted* adaptive step: attempts `step` with *h_inout, halving on
/// Broyden divergence and re-stepping via adapt_step while ||dy|| > delta.
/// On return the result satisfies dy_norm <= delta and *h_inout holds the
/// proposal for the next step.
StepResult advance(const ConstraintSystem& cs, const Mechanism& mech, const Chart& chart,
                   const VectorX& x_k, const VectorX& y_k, const Action& u, Scalar* h_inout,
                   const IntegratorConfig& cfg);

}  // namespace kinoatlas
