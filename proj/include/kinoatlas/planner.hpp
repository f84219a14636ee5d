#pragma once

#include <cstdint>

#include "kinoatlas/atlas.hpp"
#include "kinoatlas/integrator.hpp"
#include "kinoatlas/trajectory.hpp"
#include "kinoatlas/tree.hpp"
#include "kinoatlas/world.hpp"

namespace kinoatlas {

struct PlannerParams {
  Scalar beta = 0.1;       // tree connection accuracy (state units)
  Scalar delta = 0.05;     // tangent step bound, doubles as target proximity
  Scalar t_m = 0.1;        // max simulated span per action [s]
  Scalar rho_s = 1.0;      // chart ball radius (default: d_C, set at load)
  Scalar rho = 0.5;        // chart turnover radius, must be < rho_s
  Scalar cos_alpha = 0.1;  // curvature bound
  Scalar epsilon = 0.1;    // tangent-plane distance bound
  Scalar eta_F = 1e-8;     // manifold-consistency tolerance
  long max_iterations = 200000;
  std::uint64_t seed = 1;
  bool parallel_actions = true;
  IntegratorConfig integrator;

  ChartSpawnParams spawn_params() const { return {epsilon, cos_alpha, rho}; }
  void validate() const;
};

struct RunStats {
  long samples = 0;
  long charts = 0;
  long nodes_fwd = 0;
  long nodes_bwd = 0;
  long iterations = 0;
  bool success = false;
  Scalar wall_time_s = 0.0;  // reporting only, excluded from stats files
};

struct PlanningTimeoutError : std::runtime_error {
  explicit PlanningTimeoutError(RunStats s)
      : std::runtime_error("planner: max_iterations exceeded"), stats(s) {}
  RunStats stats;
};

struct PlanResult {
  Trajectory trajectory;
  RunStats stats;
  Tree forward_tree;
  Tree backward_tree;
  Atlas atlas;
};

struct SimOutcome {
  VectorX x_end;
  Scalar elapsed = 0.0;  // signed
  int chart_end = 0;
  std::vector<EdgeStep> steps;
};

/// One action simulation (tree extension candidate): integrates u from
/// x_start for at most t_m, stopping early at the target or when blocked by
/// collision/workspace/step failure. Chart spawns go into the overlay. The
/// last feasible state is returned; `steps` holds the accepted schedule.
SimOutcome simulate_action(AtlasOverlay& atlas, const ConstraintSystem& cs, const Mechanism& mech,
                           const World& world, const VectorX& x_start, int chart_start,
                           const VectorX& target, const Action& u, bool backward,
                           const PlannerParams& params);

/// Tries every action of the set from node `from`, keeps the end state
/// closest to `target`, commits the winner's spawned charts to the atlas and
/// adds the state to the tree unless it duplicates an existing node.
/// Returns the new node id or -1.
int extend_rrt(Atlas& atlas, Tree& tree, const ConstraintSystem& cs, const Mechanism& mech,
               const World& world, const std::vector<Action>& actions, int from,
               const VectorX& target, const PlannerParams& params);

/// Re-integrates the stored action of `node` from its parent state along the
/// stored step schedule. Returns the (bit-reproducible) end state.
VectorX replay_edge(const Tree& tree, int node, const Atlas& atlas, const ConstraintSystem& cs,
                    const Mechanism& mech, const IntegratorConfig& cfg);

/// Concatenates the forward branch to `fwd_node` with the time-reversed
/// backward branch from `bwd_node`, replaying every edge for sample-level
/// resolution.
Trajectory extract_trajectory(const Tree& fwd, int fwd_node, const Tree& bwd, int bwd_node,
                              const Atlas& atlas, const ConstraintSystem& cs,
                              const Mechanism& mech, const IntegratorConfig& cfg);

/// Bidirectional kinodynamic RRT over the constraint manifold. Throws
/// PlanningTimeoutError (carrying the partial stats) when max_iterations is
/// reached, std::invalid_argument on infeasible query states.
PlanResult plan(const Mechanism& mech, const ConstraintSystem& cs, const World& world,
                const VectorX& x_start, const VectorX& x_goal, const PlannerParams& params);

}  // namespace kinoatlas
