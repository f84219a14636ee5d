#pragma once

#include <vector>

#include "kinoatlas/mechanism.hpp"

namespace kinoatlas {

/// One accepted integration step of a tree edge: the chart the step was
/// computed in and the signed step size. Storing the schedule makes edge
/// replay exact even though chart polytopes keep shrinking as the atlas
/// grows.
struct EdgeStep {
  int chart = 0;
  Scalar h = 0.0;
};

struct TreeNode {
  VectorX state;              // manifold-consistent, collision-free
  int parent = -1;            // node id; -1 for the root
  Action action;              // applied from the parent; empty for the root
  Scalar duration = 0.0;      // signed elapsed time (negative on backward trees)
  int chart = 0;              // chart owning `state`
  std::vector<EdgeStep> steps;
};

/// Append-only RRT; the backward tree integrates with negative time steps.
class Tree {
 public:
  Tree(const VectorX& root_state, int root_chart, bool backward);

  bool backward() const { return backward_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const TreeNode& node(int id) const { return nodes_.at(static_cast<size_t>(id)); }

  int add(TreeNode n);

  /// Node minimizing the ambient Euclidean distance to x (ties: lowest id).
  int nearest(const VectorX& x) const;

  /// Whether some node state lies within `tol` of x (the "x_b not in T" test).
  bool contains_state(const VectorX& x, Scalar tol) const;

  /// Sorted ids of charts owning at least one node of this tree.
  const std::vector<int>& occupied_charts() const { return occupied_; }

 private:
  std::vector<TreeNode> nodes_;
  bool backward_;
  std::vector<long> chart_count_;
  std::vector<int> occupied_;

  void count_chart(int chart);
};

}  // namespace kinoatlas
