#pragma once

#include "kinoatlas/planar_linkage.hpp"
#include "kinoatlas/point_on_circle.hpp"

namespace kinoatlas {

/// Built-in mechanisms mirrored by the shipped problem files.

/// Unit pendulum on a circle: m = 1 kg, L = 1 m, g = 9.81. With the default
/// torque limit of 6 Nm the static requirement m g L is unreachable, so
/// swing-up plans must pump.
std::shared_ptr<PointOnCircle> make_circle_pendulum(Scalar torque_max = 6.0);

/// Closed four-bar chain with unit-length moving links (slender rods) and
/// ground pivots 0.8 m apart; the crank is actuated. Grashof double-crank,
/// so the configuration curve has no singularities. n_q = 4, n_e = 3.
std::shared_ptr<PlanarLinkage> make_four_bar(Scalar torque_max = 16.0);

/// Symmetric five-bar (two 2R arms joined at the effector) with both base
/// joints actuated and a linear spring between the distal links.
/// n_q = 5, n_e = 3.
std::shared_ptr<PlanarLinkage> make_five_bar(Scalar torque_max = 2.0);

/// Configuration guesses for assembled poses of the built-in linkages;
/// project_to_manifold turns them into exact states. `crank_up` selects the
/// raised pose on the same branch as the hanging one.
VectorX four_bar_guess(bool crank_up);
VectorX five_bar_guess(Scalar effector_x);

}  // namespace kinoatlas
