#include "kinoatlas/atlas.hpp"

#include <ostream>

namespace kinoatlas {

namespace {

// Installs the Eq.-style mutual bounds between two charts when each center
// projects inside the other's ball.
void coordinate_charts(Chart& a, Chart& b) {
  const VectorX y_b_in_a = chart_coords(a, b.center);
  const VectorX y_a_in_b = chart_coords(b, a.center);
  if (y_b_in_a.norm() <= a.radius && y_a_in_b.norm() <= b.radius) {
    a.cuts.push_back({y_b_in_a, b.id});
    b.cuts.push_back({y_a_in_b, a.id});
  }
}

}  // namespace

Atlas::Atlas(ConstraintSystem cs, Scalar rho_s, Scalar eta)
    : cs_(std::move(cs)), rho_s_(rho_s), eta_(eta) {}

Atlas Atlas::init(ConstraintSystem cs, Scalar rho_s, const VectorX& x_start, const VectorX& x_goal,
                  Scalar eta) {
  Atlas a(std::move(cs), rho_s, eta);
  a.add_chart(x_start);
  a.add_chart(x_goal);
  return a;
}

int Atlas::add_chart(const VectorX& x) {
  if (!is_manifold_consistent(cs_, x, eta_))
    throw std::invalid_argument("Atlas::add_chart: center is not manifold-consistent");
  Chart c;
  c.id = size();
  c.center = x;
  c.basis = tangent_basis(cs_, x);
  c.radius = rho_s_;
  for (Chart& e : charts_) coordinate_charts(e, c);
  charts_.push_back(std::move(c));
  return size() - 1;
}

Atlas::Sample Atlas::sample_tangent_point(const std::vector<int>& occupied, CounterRng& rng,
                                          long* attempts) const {
  if (occupied.empty())
    throw std::invalid_argument("Atlas::sample_tangent_point: no occupied charts");
  for (;;) {
    if (attempts) ++*attempts;
    const Chart& c = chart(occupied[rng.uniform_index(occupied.size())]);
    const VectorX y = rng.uniform_ball(c.basis.cols(), c.radius);
    if (in_polytope(c, y)) return {chart_point(c, y), c.id};
  }
}

void Atlas::dump(std::ostream& os) const {
  os << "atlas charts=" << size() << " ambient_dim=" << cs_.dim_ambient()
     << " tangent_dim=" << cs_.dim_x() << "\n";
  const Eigen::IOFormat fmt(Eigen::FullPrecision, Eigen::DontAlignCols, " ");
  for (const Chart& c : charts_) {
    os << "chart " << c.id << "\n";
    os << "  radius " << c.radius << "\n";
    os << "  center " << c.center.transpose().format(fmt) << "\n";
    for (Index r = 0; r < c.basis.rows(); ++r)
      os << "  basis_row " << c.basis.row(r).format(fmt) << "\n";
    for (const Cut& k : c.cuts)
      os << "  cut neighbor=" << k.neighbor << " y " << k.y.transpose().format(fmt) << "\n";
  }
}

int most_violated_cut_neighbor(const Chart& c, const VectorX& y) {
  int best = -1;
  Scalar best_violation = 0.0;
  for (const Cut& k : c.cuts) {
    const Scalar v = y.dot(k.y) - 0.5 * k.y.squaredNorm();
    if (v > best_violation) {
      best_violation = v;
      best = k.neighbor;
    }
  }
  if (best < 0) throw NoNeighborError("no cut violated: parameters left through the ball boundary");
  return best;
}

const Chart& AtlasOverlay::chart(int id) const {
  if (id >= base_->size()) return added_.at(static_cast<size_t>(id - base_->size()));
  auto it = amended_.find(id);
  return it != amended_.end() ? it->second : base_->chart(id);
}

Chart& AtlasOverlay::mutable_chart(int id) {
  if (id >= base_->size()) return added_.at(static_cast<size_t>(id - base_->size()));
  auto it = amended_.find(id);
  if (it == amended_.end()) it = amended_.emplace(id, base_->chart(id)).first;
  return it->second;
}

int AtlasOverlay::add_chart(const VectorX& x) {
  if (!is_manifold_consistent(base_->cs_, x, base_->eta_))
    throw std::invalid_argument("AtlasOverlay::add_chart: center is not manifold-consistent");
  Chart c;
  c.id = size();
  c.center = x;
  c.basis = tangent_basis(base_->cs_, x);
  c.radius = base_->rho_s_;
  // Same pairing order as Atlas::add_chart so that committing the spawn
  // centers reproduces identical cuts.
  for (int id = 0; id < size(); ++id) {
    const VectorX y_new = chart_coords(chart(id), c.center);
    const VectorX y_old = chart_coords(c, chart(id).center);
    if (y_new.norm() <= chart(id).radius && y_old.norm() <= c.radius) {
      mutable_chart(id).cuts.push_back({y_new, c.id});
      c.cuts.push_back({y_old, id});
    }
  }
  spawned_centers_.push_back(x);
  added_.push_back(std::move(c));
  return size() - 1;
}

}  // namespace kinoatlas
