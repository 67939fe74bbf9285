#include "popmeas/epsilon_net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace popmeas {

namespace {

// Deduplicated graph-vertex points plus interior edge subdivisions with
// gap at most `gap`.
std::vector<Point> graph_centers(const Space& space, double gap) {
  std::vector<Point> centers;
  std::vector<int> vertex_edge(space.vertex_count(), -1);
  std::vector<double> vertex_offset(space.vertex_count(), 0.0);
  for (int e = 0; e < static_cast<int>(space.edges().size()); ++e) {
    const auto& edge = space.edges()[e];
    if (vertex_edge[edge.from] < 0) {
      vertex_edge[edge.from] = e;
      vertex_offset[edge.from] = 0.0;
    }
    if (vertex_edge[edge.to] < 0) {
      vertex_edge[edge.to] = e;
      vertex_offset[edge.to] = edge.length;
    }
  }
  for (int v = 0; v < space.vertex_count(); ++v)
    if (vertex_edge[v] >= 0)
      centers.push_back(GraphPosition{vertex_edge[v], vertex_offset[v]});
  for (int e = 0; e < static_cast<int>(space.edges().size()); ++e) {
    const double len = space.edges()[e].length;
    const int segments = std::max(1, static_cast<int>(std::ceil(len / gap)));
    for (int i = 1; i < segments; ++i)
      centers.push_back(GraphPosition{e, len * i / segments});
  }
  return centers;
}

}  // namespace

EpsilonNet::EpsilonNet(Space space, CompactSet cover, std::vector<Point> centers,
                       double radius, double cutoff)
    : space_(std::move(space)),
      cover_(std::move(cover)),
      centers_(std::move(centers)),
      radius_(radius),
      cutoff_(cutoff) {
  if (!(radius_ > 0.0)) throw std::invalid_argument("net radius must be positive");
  if (!(cutoff_ > 0.0 && cutoff_ < 1.0))
    throw std::invalid_argument("net cutoff must lie in (0,1)");
  if (centers_.empty()) throw std::invalid_argument("net needs at least one center");
  for (const auto& z : centers_) space_.require_valid(z);

  // Lipschitz bound for phi_l = h_l / max(S, cutoff): the hat term gives
  // 1/(cutoff*radius); the S term is controlled by how many centers can be
  // active near a single bump, bounded by the 3*radius packing count.
  int packing = 0;
  for (int l = 0; l < size(); ++l) {
    int near = 0;
    for (int j = 0; j < size(); ++j)
      if (space_.distance(centers_[l], centers_[j]) < 3.0 * radius_) ++near;
    packing = std::max(packing, near);
  }
  lipschitz_bound_ =
      (1.0 / (cutoff_ * radius_)) * (1.0 + static_cast<double>(packing) / cutoff_);
}

Eigen::VectorXd EpsilonNet::hat_values(const Point& x) const {
  Eigen::VectorXd h(size());
  for (int l = 0; l < size(); ++l)
    h[l] = std::max(0.0, 1.0 - space_.distance(x, centers_[l]) / radius_);
  return h;
}

Eigen::VectorXd EpsilonNet::partition(const Point& x) const {
  Eigen::VectorXd h = hat_values(x);
  const double denom = std::max(h.sum(), cutoff_);
  return h / denom;
}

std::pair<int, double> EpsilonNet::nearest_center(const Point& x) const {
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int l = 0; l < size(); ++l) {
    const double d = space_.distance(x, centers_[l]);
    if (d < best_dist) {
      best = l;
      best_dist = d;
    }
  }
  return {best, best_dist};
}

EpsilonNet build_epsilon_net(const Space& space, const CompactSet& K, double epsilon,
                             double cutoff) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("net radius must be positive");
  std::vector<Point> centers;
  switch (space.kind()) {
    case Space::Kind::Euclidean: {
      const auto& lo = K.whole() ? space.lower() : K.lower();
      const auto& hi = K.whole() ? space.upper() : K.upper();
      if (lo.size() == 0) throw std::invalid_argument("net cover set is empty");
      const int dim = static_cast<int>(lo.size());
      const double step_target = epsilon / (2.0 * std::sqrt(static_cast<double>(dim)));
      std::vector<int> counts(dim);
      std::vector<double> steps(dim);
      long long total = 1;
      for (int i = 0; i < dim; ++i) {
        const double span = hi[i] - lo[i];
        counts[i] = span > 0.0 ? std::max(1, static_cast<int>(std::ceil(span / step_target)))
                               : 0;
        steps[i] = counts[i] > 0 ? span / counts[i] : 0.0;
        total *= counts[i] + 1;
      }
      if (total > 2'000'000)
        throw std::invalid_argument("net would have more than 2e6 centers; increase epsilon");
      std::vector<int> idx(dim, 0);
      while (true) {
        Eigen::VectorXd z(dim);
        for (int i = 0; i < dim; ++i) z[i] = lo[i] + idx[i] * steps[i];
        centers.push_back(z);
        int axis = dim - 1;
        while (axis >= 0 && ++idx[axis] > counts[axis]) idx[axis--] = 0;
        if (axis < 0) break;
      }
      break;
    }
    case Space::Kind::Graph:
      centers = graph_centers(space, epsilon / 2.0);
      break;
    case Space::Kind::Finite:
      for (int i = 0; i < space.cardinality(); ++i) centers.push_back(FiniteIndex{i});
      break;
  }
  const CompactSet cover =
      space.kind() == Space::Kind::Euclidean && !K.whole()
          ? K
          : (space.kind() == Space::Kind::Euclidean
                 ? CompactSet::box(space.lower(), space.upper())
                 : CompactSet::whole_space());
  return EpsilonNet(space, cover, std::move(centers), epsilon, cutoff);
}

}  // namespace popmeas
