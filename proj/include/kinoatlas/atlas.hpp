#pragma once

#include <iosfwd>
#include <map>
#include <vector>

#include "kinoatlas/chart.hpp"
#include "kinoatlas/rng.hpp"

namespace kinoatlas {

/// Incrementally grown collection of tangent-space charts covering the
/// explored part of the state manifold. Charts are append-only with stable
/// ids; parameter sets only shrink (cuts are only added).
class Atlas {
 public:
  Atlas(ConstraintSystem cs, Scalar rho_s, Scalar eta = 1e-8);

  /// Atlas seeded with charts at the two query states (ids 0 and 1).
  static Atlas init(ConstraintSystem cs, Scalar rho_s, const VectorX& x_start,
                    const VectorX& x_goal, Scalar eta = 1e-8);

  /// Appends a chart centered at the manifold-consistent state x and installs
  /// mutual polytope cuts with every chart whose center projects inside the
  /// other's ball. Returns the new chart id.
  int add_chart(const VectorX& x);

  int size() const { return static_cast<int>(charts_.size()); }
  const Chart& chart(int id) const { return charts_.at(static_cast<size_t>(id)); }
  const ConstraintSystem& constraints() const { return cs_; }
  Scalar rho_s() const { return rho_s_; }

  struct Sample {
    VectorX point;  // ambient tangent-plane point x_r + U_r y_r
    int chart = -1;
  };

  /// Rejection sampling of Algorithm "Sample a state": pick a chart uniformly
  /// among `occupied` (charts owning at least one node of the tree being
  /// extended), draw y uniformly in the rho_s ball, retry until y lies in the
  /// chart polytope. The returned point is *not* lifted to the manifold.
  Sample sample_tangent_point(const std::vector<int>& occupied, CounterRng& rng,
                              long* attempts = nullptr) const;

  void dump(std::ostream& os) const;

 private:
  friend class AtlasOverlay;
  ConstraintSystem cs_;
  Scalar rho_s_;
  Scalar eta_;
  std::vector<Chart> charts_;
};

/// Most violated cut of chart c at parameters y (ties: lowest neighbor id).
/// Throws NoNeighborError when no cut is violated, i.e. y left through the
/// ball boundary. Precondition: y is outside the polytope of c.
int most_violated_cut_neighbor(const Chart& c, const VectorX& y);

/// Copy-on-write view of an Atlas used by candidate-action simulations:
/// chart spawns and the cuts they induce are buffered locally, the base atlas
/// is never touched. Committing the winner replays its spawn centers on the
/// base atlas, which reproduces the buffered charts exactly.
class AtlasOverlay {
 public:
  explicit AtlasOverlay(const Atlas& base) : base_(&base) {}

  int size() const { return base_->size() + static_cast<int>(added_.size()); }
  const Chart& chart(int id) const;
  const ConstraintSystem& constraints() const { return base_->cs_; }

  int add_chart(const VectorX& x);
  int neighbor_chart(int c, const VectorX& y) const { return most_violated_cut_neighbor(chart(c), y); }

  const std::vector<VectorX>& spawned_centers() const { return spawned_centers_; }

 private:
  const Atlas* base_;
  std::map<int, Chart> amended_;  // base charts that gained local cuts
  std::vector<Chart> added_;
  std::vector<VectorX> spawned_centers_;

  Chart& mutable_chart(int id);
};

}  // namespace kinoatlas
