#include "kinoatlas/tree.hpp"

#include <algorithm>
#include <limits>

namespace kinoatlas {

Tree::Tree(const VectorX& root_state, int root_chart, bool backward) : backward_(backward) {
  TreeNode root;
  root.state = root_state;
  root.chart = root_chart;
  nodes_.push_back(std::move(root));
  count_chart(root_chart);
}

int Tree::add(TreeNode n) {
  if (n.parent < 0 || n.parent >= size())
    throw std::invalid_argument("Tree::add: parent id out of range");
  count_chart(n.chart);
  nodes_.push_back(std::move(n));
  return size() - 1;
}

int Tree::nearest(const VectorX& x) const {
  int best = 0;
  Scalar best_d = std::numeric_limits<Scalar>::infinity();
  for (int i = 0; i < size(); ++i) {
    const Scalar d = (nodes_[static_cast<size_t>(i)].state - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

bool Tree::contains_state(const VectorX& x, Scalar tol) const {
  for (const TreeNode& n : nodes_)
    if ((n.state - x).norm() <= tol) return true;
  return false;
}

void Tree::count_chart(int chart) {
  if (chart >= static_cast<int>(chart_count_.size())) chart_count_.resize(chart + 1, 0);
  if (chart_count_[static_cast<size_t>(chart)]++ == 0)
    occupied_.insert(std::lower_bound(occupied_.begin(), occupied_.end(), chart), chart);
}

}  // namespace kinoatlas
