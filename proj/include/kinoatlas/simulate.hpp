#pragma once

#include <optional>

#include "kinoatlas/atlas.hpp"
#include "kinoatlas/integrator.hpp"
#include "kinoatlas/trajectory.hpp"

namespace kinoatlas {

struct TimedState {
  Scalar t = 0.0;
  VectorX x;
};

struct SimOptions {
  ChartSpawnParams spawn;
  IntegratorConfig integrator;
  Scalar rho_s = 1.0;
  Scalar eta = 1e-8;
  std::optional<Scalar> fixed_h;  // bypass step adaptation when set
};

/// Drift-free integration of an action schedule with full chart management
/// (spawn tests, neighbor transitions) over a private atlas seeded at x0.
/// Steps are clamped so segment boundaries are hit exactly; every accepted
/// state is appended to `out`. Throws StepTooSmallError / StepDivergedError /
/// SingularityError on failure, leaving the partial series in `out`.
void integrate_charted(const Mechanism& mech, const ConstraintSystem& cs, const VectorX& x0,
                       const ActionSchedule& schedule, const SimOptions& opts,
                       std::vector<TimedState>& out);

/// Plain fixed-step Runge-Kutta 4 on xdot = g(x, u), ignoring the manifold
/// structure. Used for drift comparisons; constraint violation grows.
void integrate_ode_rk4(const Mechanism& mech, const ConstraintSystem& cs, const VectorX& x0,
                       const ActionSchedule& schedule, Scalar h, std::vector<TimedState>& out);

}  // namespace kinoatlas
