#include "kinoatlas/planner.hpp"

#include <chrono>
#include <cmath>
#include <future>

namespace kinoatlas {

void PlannerParams::validate() const {
  if (!(rho < rho_s)) throw std::invalid_argument("params: rho must be smaller than rho_s");
  if (beta <= 0.0) throw std::invalid_argument("params: beta must be positive");
  if (t_m <= 0.0) throw std::invalid_argument("params: t_m must be positive");
  if (delta <= 0.0) throw std::invalid_argument("params: delta must be positive");
  if (max_iterations <= 0) throw std::invalid_argument("params: max_iterations must be positive");
  if (integrator.h_min <= 0.0 || integrator.h_init < integrator.h_min ||
      integrator.h_max < integrator.h_init)
    throw std::invalid_argument("params: need 0 < h_min <= h_init <= h_max");
}

SimOutcome simulate_action(AtlasOverlay& atlas, const ConstraintSystem& cs, const Mechanism& mech,
                           const World& world, const VectorX& x_start, int chart_start,
                           const VectorX& target, const Action& u, bool backward,
                           const PlannerParams& params) {
  IntegratorConfig integ = params.integrator;
  integ.delta = params.delta;
  const ChartSpawnParams spawn = params.spawn_params();

  SimOutcome out;
  out.x_end = x_start;
  out.chart_end = chart_start;

  int c = chart_start;
  VectorX x = x_start;
  Scalar t = 0.0;
  Scalar h = backward ? -integ.h_init : integ.h_init;
  int consecutive_spawns = 0;
  constexpr int kMaxSteps = 20000;

  for (int n_steps = 0; n_steps < kMaxSteps; ++n_steps) {
    if ((x - target).norm() <= params.delta) break;  // target reached
    if (std::abs(t) >= params.t_m) break;            // simulation span exhausted

    const int c_step = c;  // chart the step is computed in, for the replay log
    const VectorX y = chart_coords(atlas.chart(c), x);
    StepResult r;
    try {
      r = advance(cs, mech, atlas.chart(c), x, y, u, &h, integ);
    } catch (const StepTooSmallError&) {
      break;  // blocked: return the last good state
    } catch (const SingularityError&) {
      break;
    }
    if (collision(world, mech, r.x_next) || out_of_workspace(world, mech, r.x_next)) break;

    if (needs_new_chart(atlas.chart(c), x, r.x_next, y, r.y_next, spawn)) {
      try {
        c = atlas.add_chart(x);
      } catch (const SingularityError&) {
        break;
      }
      if (++consecutive_spawns > 4) {
        h *= 0.5;
        if (std::abs(h) < integ.h_min) break;
      }
      continue;  // retry the step in the chart spawned at x
    }
    consecutive_spawns = 0;
    if (!in_polytope(atlas.chart(c), r.y_next)) {
      try {
        c = atlas.neighbor_chart(c, r.y_next);
      } catch (const NoNeighborError&) {
        try {
          c = atlas.add_chart(x);
        } catch (const SingularityError&) {
          break;
        }
        continue;
      }
    }
    t += r.h_used;
    x = r.x_next;
    out.steps.push_back({c_step, r.h_used});
    out.x_end = x;
    out.elapsed = t;
    out.chart_end = c;
  }
  return out;
}

namespace {

// The step is computed in the chart that was current *before* any neighbor
// switch, which is what the log must record for exact replay.
struct CandidateRun {
  SimOutcome outcome;
  AtlasOverlay overlay;
};

}  // namespace

int extend_rrt(Atlas& atlas, Tree& tree, const ConstraintSystem& cs, const Mechanism& mech,
               const World& world, const std::vector<Action>& actions, int from,
               const VectorX& target, const PlannerParams& params) {
  const TreeNode& origin = tree.node(from);

  std::vector<AtlasOverlay> overlays;
  overlays.reserve(actions.size());
  for (size_t i = 0; i < actions.size(); ++i) overlays.emplace_back(atlas);

  std::vector<SimOutcome> outcomes(actions.size());
  auto run = [&](size_t i) {
    outcomes[i] = simulate_action(overlays[i], cs, mech, world, origin.state, origin.chart,
                                  target, actions[i], tree.backward(), params);
  };
  if (params.parallel_actions && actions.size() > 1) {
    std::vector<std::future<void>> futs;
    futs.reserve(actions.size());
    for (size_t i = 0; i < actions.size(); ++i)
      futs.push_back(std::async(std::launch::async, run, i));
    for (auto& f : futs) f.get();
  } else {
    for (size_t i = 0; i < actions.size(); ++i) run(i);
  }

  size_t best = 0;
  Scalar best_d = std::numeric_limits<Scalar>::infinity();
  for (size_t i = 0; i < outcomes.size(); ++i) {
    const Scalar d = (outcomes[i].x_end - target).norm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }

  // snapshot-and-commit: only the winner's chart spawns reach the atlas
  for (const VectorX& x : overlays[best].spawned_centers()) atlas.add_chart(x);

  SimOutcome& win = outcomes[best];
  if (win.steps.empty() || tree.contains_state(win.x_end, params.eta_F)) return -1;

  TreeNode n;
  n.state = win.x_end;
  n.parent = from;
  n.action = actions[best];
  n.duration = win.elapsed;
  n.chart = win.chart_end;
  n.steps = std::move(win.steps);
  return tree.add(std::move(n));
}

VectorX replay_edge(const Tree& tree, int node, const Atlas& atlas, const ConstraintSystem& cs,
                    const Mechanism& mech, const IntegratorConfig& cfg) {
  const TreeNode& n = tree.node(node);
  if (n.parent < 0) return n.state;
  VectorX x = tree.node(n.parent).state;
  for (const EdgeStep& es : n.steps) {
    const Chart& c = atlas.chart(es.chart);
    x = step(cs, mech, c, x, chart_coords(c, x), n.action, es.h, cfg).x_next;
  }
  return x;
}

namespace {

std::vector<int> path_to_root(const Tree& tree, int node) {
  std::vector<int> ids;
  for (int id = node; id >= 0; id = tree.node(id).parent) ids.push_back(id);
  return ids;  // node first, root last
}

}  // namespace

Trajectory extract_trajectory(const Tree& fwd, int fwd_node, const Tree& bwd, int bwd_node,
                              const Atlas& atlas, const ConstraintSystem& cs,
                              const Mechanism& mech, const IntegratorConfig& cfg) {
  Trajectory traj;
  const Action zero = mech.zero_action();

  auto append_sample = [&](Scalar ts, const VectorX& x, const Action& u_from_here) {
    traj.samples.push_back({ts, x, u_from_here});
  };

  Scalar t = 0.0;
  append_sample(0.0, fwd.node(0).state, zero);

  // forward branch, replayed edge by edge
  std::vector<int> fwd_ids = path_to_root(fwd, fwd_node);
  std::reverse(fwd_ids.begin(), fwd_ids.end());  // root ... fwd_node
  for (size_t k = 1; k < fwd_ids.size(); ++k) {
    const TreeNode& n = fwd.node(fwd_ids[k]);
    VectorX x = fwd.node(n.parent).state;
    traj.samples.back().u = n.action;
    for (const EdgeStep& es : n.steps) {
      const Chart& c = atlas.chart(es.chart);
      x = step(cs, mech, c, x, chart_coords(c, x), n.action, es.h, cfg).x_next;
      t += std::abs(es.h);
      append_sample(t, x, n.action);
    }
    traj.schedule.push_back({n.action, std::abs(n.duration)});
  }

  // backward branch: each edge, replayed from its parent with negative h,
  // yields states parent -> child in reverse physical time; emit them
  // child -> parent with the step durations reversed.
  for (int id = bwd_node; id > 0; id = bwd.node(id).parent) {
    const TreeNode& n = bwd.node(id);
    VectorX x = bwd.node(n.parent).state;
    std::vector<VectorX> states{x};
    for (const EdgeStep& es : n.steps) {
      const Chart& c = atlas.chart(es.chart);
      x = step(cs, mech, c, x, chart_coords(c, x), n.action, es.h, cfg).x_next;
      states.push_back(x);
    }
    // states.back() == n.state; in forward time the motion visits
    // states[m], states[m-1], ..., states[0]
    traj.samples.back().u = n.action;
    for (size_t k = states.size() - 1; k-- > 0;) {
      t += std::abs(n.steps[k].h);
      append_sample(t, states[k], n.action);
    }
    traj.schedule.push_back({n.action, std::abs(n.duration)});
  }

  traj.samples.back().u = zero;
  traj.total_time = t;
  return traj;
}

PlanResult plan(const Mechanism& mech, const ConstraintSystem& cs, const World& world,
                const VectorX& x_start, const VectorX& x_goal, const PlannerParams& params) {
  params.validate();
  const auto t0 = std::chrono::steady_clock::now();

  for (const VectorX* x : {&x_start, &x_goal}) {
    if (!is_manifold_consistent(cs, *x, params.eta_F))
      throw std::invalid_argument("plan: query state is not manifold-consistent");
    if (collision(world, mech, *x) || out_of_workspace(world, mech, *x))
      throw std::invalid_argument("plan: query state is not collision-free");
  }

  Atlas atlas = Atlas::init(cs, params.rho_s, x_start, x_goal, params.eta_F);
  Tree fwd(x_start, 0, false);
  Tree bwd(x_goal, 1, true);
  CounterRng rng(params.seed);
  const std::vector<Action> actions = action_set(mech);

  RunStats stats;
  auto finish = [&](bool success, Trajectory traj) {
    stats.success = success;
    stats.charts = atlas.size();
    stats.nodes_fwd = fwd.size();
    stats.nodes_bwd = bwd.size();
    stats.wall_time_s =
        std::chrono::duration<Scalar>(std::chrono::steady_clock::now() - t0).count();
    return PlanResult{std::move(traj), stats, std::move(fwd), std::move(bwd), std::move(atlas)};
  };

  if ((x_start - x_goal).norm() < params.beta) {
    Trajectory traj;
    traj.samples.push_back({0.0, x_start, mech.zero_action()});
    return finish(true, std::move(traj));
  }

  Tree* active = &fwd;
  Tree* passive = &bwd;
  for (long iter = 1; iter <= params.max_iterations; ++iter) {
    stats.iterations = iter;

    const Atlas::Sample sample = atlas.sample_tangent_point(active->occupied_charts(), rng);
    ++stats.samples;
    const int near = active->nearest(sample.point);
    const int added =
        extend_rrt(atlas, *active, cs, mech, world, actions, near, sample.point, params);
    if (added >= 0) {
      const VectorX x_link = active->node(added).state;
      const int near_other = passive->nearest(x_link);
      const int added_other =
          extend_rrt(atlas, *passive, cs, mech, world, actions, near_other, x_link, params);
      if (added_other >= 0 &&
          (x_link - passive->node(added_other).state).norm() < params.beta) {
        const bool active_is_fwd = !active->backward();
        const int fwd_node = active_is_fwd ? added : added_other;
        const int bwd_node = active_is_fwd ? added_other : added;
        IntegratorConfig integ = params.integrator;
        integ.delta = params.delta;
        Trajectory traj = extract_trajectory(fwd, fwd_node, bwd, bwd_node, atlas, cs, mech, integ);
        return finish(true, std::move(traj));
      }
    }
    std::swap(active, passive);
  }

  stats.success = false;
  stats.charts = atlas.size();
  stats.nodes_fwd = fwd.size();
  stats.nodes_bwd = bwd.size();
  stats.wall_time_s = std::chrono::duration<Scalar>(std::chrono::steady_clock::now() - t0).count();
  throw PlanningTimeoutError(stats);
}

}  // namespace kinoatlas
