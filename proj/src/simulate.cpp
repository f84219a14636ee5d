#include "kinoatlas/simulate.hpp"

#include <cmath>

namespace kinoatlas {

void integrate_charted(const Mechanism& mech, const ConstraintSystem& cs, const VectorX& x0,
                       const ActionSchedule& schedule, const SimOptions& opts,
                       std::vector<TimedState>& out) {
  Atlas base(cs, opts.rho_s, opts.eta);
  base.add_chart(x0);
  AtlasOverlay atlas(base);

  out.push_back({0.0, x0});

  int c = 0;
  VectorX x = x0;
  Scalar t = 0.0;
  Scalar h = opts.fixed_h.value_or(opts.integrator.h_init);

  for (const ActionSegment& seg : schedule) {
    const Scalar t_end = t + seg.duration;
    int consecutive_spawns = 0;
    while (t < t_end - 1e-15) {
      const Scalar h_clamped = std::min(std::abs(h), t_end - t);
      const VectorX y = chart_coords(atlas.chart(c), x);
      StepResult r;
      if (opts.fixed_h) {
        r = step(cs, mech, atlas.chart(c), x, y, seg.u, h_clamped, opts.integrator);
      } else {
        Scalar h_io = h_clamped;
        r = advance(cs, mech, atlas.chart(c), x, y, seg.u, &h_io, opts.integrator);
        h = h_io;
      }
      if (needs_new_chart(atlas.chart(c), x, r.x_next, y, r.y_next, opts.spawn)) {
        c = atlas.add_chart(x);
        if (++consecutive_spawns > 4) {
          h *= 0.5;
          if (std::abs(h) < opts.integrator.h_min)
            throw StepTooSmallError("integrate_charted: stuck at a chart spawn");
        }
        continue;  // retry the step in the fresh chart
      }
      consecutive_spawns = 0;
      if (!in_polytope(atlas.chart(c), r.y_next)) {
        try {
          c = atlas.neighbor_chart(c, r.y_next);
        } catch (const NoNeighborError&) {
          c = atlas.add_chart(x);
          continue;
        }
      }
      t += r.h_used;
      x = r.x_next;
      out.push_back({t, x});
    }
  }
}

void integrate_ode_rk4(const Mechanism& mech, const ConstraintSystem& cs, const VectorX& x0,
                       const ActionSchedule& schedule, Scalar h, std::vector<TimedState>& out) {
  out.push_back({0.0, x0});
  VectorX x = x0;
  Scalar t = 0.0;
  for (const ActionSegment& seg : schedule) {
    const Scalar t_end = t + seg.duration;
    while (t < t_end - 1e-15) {
      const Scalar hs = std::min(h, t_end - t);
      const VectorX k1 = forward_dynamics(mech, cs, x, seg.u);
      const VectorX k2 = forward_dynamics(mech, cs, x + 0.5 * hs * k1, seg.u);
      const VectorX k3 = forward_dynamics(mech, cs, x + 0.5 * hs * k2, seg.u);
      const VectorX k4 = forward_dynamics(mech, cs, x + hs * k3, seg.u);
      x += hs / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += hs;
      out.push_back({t, x});
    }
  }
}

}  // namespace kinoatlas
