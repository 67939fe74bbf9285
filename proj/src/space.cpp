#include "popmeas/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace popmeas {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd all_pairs_vertex_distances(int n, const std::vector<GraphEdge>& edges) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, kInf);
  for (int i = 0; i < n; ++i) d(i, i) = 0.0;
  for (const auto& e : edges) {
    d(e.from, e.to) = std::min(d(e.from, e.to), e.length);
    d(e.to, e.from) = d(e.from, e.to);
  }
  // Floyd-Warshall; graphs stay small enough that O(n^3) is fine.
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d(i, k) + d(k, j) < d(i, j)) d(i, j) = d(i, k) + d(k, j);
  return d;
}

}  // namespace

Space Space::euclidean_box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() == 0 || lower.size() != upper.size())
    throw std::invalid_argument("euclidean box: bounds must be nonempty and of equal size");
  for (int i = 0; i < lower.size(); ++i)
    if (!(lower[i] < upper[i]))
      throw std::invalid_argument("euclidean box: lower bound must be below upper bound on every axis");
  Space s;
  s.kind_ = Kind::Euclidean;
  s.euclidean_ = {std::move(lower), std::move(upper)};
  return s;
}

Space Space::graph(int vertex_count, std::vector<GraphEdge> edges) {
  if (vertex_count <= 0) throw std::invalid_argument("graph: vertex count must be positive");
  if (edges.empty()) throw std::invalid_argument("graph: needs at least one edge");
  for (const auto& e : edges) {
    if (e.from < 0 || e.from >= vertex_count || e.to < 0 || e.to >= vertex_count)
      throw std::invalid_argument("graph: edge endpoint out of range");
    if (!(e.length > 0.0)) throw std::invalid_argument("graph: edge lengths must be strictly positive");
  }
  Space s;
  s.kind_ = Kind::Graph;
  s.graph_.vertex_count = vertex_count;
  s.graph_.edges = std::move(edges);
  s.graph_.vertex_dist = all_pairs_vertex_distances(vertex_count, s.graph_.edges);
  if (!s.graph_.vertex_dist.allFinite())
    throw std::invalid_argument("graph: must be connected");
  return s;
}

Space Space::finite(Eigen::MatrixXd distances) {
  const auto n = distances.rows();
  if (n == 0 || distances.cols() != n)
    throw std::invalid_argument("finite metric: matrix must be square and nonempty");
  constexpr double tol = 1e-12;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(distances(i, i)) > tol)
      throw std::invalid_argument("finite metric: diagonal must be zero");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (distances(i, j) < -tol)
        throw std::invalid_argument("finite metric: distances must be nonnegative");
      if (std::abs(distances(i, j) - distances(j, i)) > tol)
        throw std::invalid_argument("finite metric: matrix must be symmetric");
    }
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        if (distances(i, j) > distances(i, k) + distances(k, j) + tol)
          throw std::invalid_argument("finite metric: triangle inequality violated");
  Space s;
  s.kind_ = Kind::Finite;
  s.finite_.dist = std::move(distances);
  return s;
}

int Space::dimension() const {
  return kind_ == Kind::Euclidean ? static_cast<int>(euclidean_.lower.size()) : 0;
}

int Space::cardinality() const {
  switch (kind_) {
    case Kind::Finite: return static_cast<int>(finite_.dist.rows());
    case Kind::Graph: return graph_.vertex_count;
    default: return 0;
  }
}

bool Space::valid(const Point& p) const {
  switch (kind_) {
    case Kind::Euclidean: {
      const auto* v = std::get_if<Eigen::VectorXd>(&p);
      return v && v->size() == euclidean_.lower.size() && v->allFinite();
    }
    case Kind::Graph: {
      const auto* g = std::get_if<GraphPosition>(&p);
      if (!g || g->edge < 0 || g->edge >= static_cast<int>(graph_.edges.size())) return false;
      const double len = graph_.edges[g->edge].length;
      return g->offset >= 0.0 && g->offset <= len;
    }
    case Kind::Finite: {
      const auto* f = std::get_if<FiniteIndex>(&p);
      return f && f->value >= 0 && f->value < finite_.dist.rows();
    }
  }
  return false;
}

void Space::require_valid(const Point& p) const {
  if (!valid(p)) throw std::invalid_argument("point invalid for space: " + point_to_string(p));
}

double Space::distance(const Point& p, const Point& q) const {
  require_valid(p);
  require_valid(q);
  switch (kind_) {
    case Kind::Euclidean:
      return (std::get<Eigen::VectorXd>(p) - std::get<Eigen::VectorXd>(q)).norm();
    case Kind::Finite:
      return finite_.dist(std::get<FiniteIndex>(p).value, std::get<FiniteIndex>(q).value);
    case Kind::Graph: {
      const auto& a = std::get<GraphPosition>(p);
      const auto& b = std::get<GraphPosition>(q);
      const auto& ea = graph_.edges[a.edge];
      const auto& eb = graph_.edges[b.edge];
      // Distances from each point to the two endpoints of its own edge.
      const double a_from = a.offset, a_to = ea.length - a.offset;
      const double b_from = b.offset, b_to = eb.length - b.offset;
      const auto& D = graph_.vertex_dist;
      double best = std::min({a_from + D(ea.from, eb.from) + b_from,
                              a_from + D(ea.from, eb.to) + b_to,
                              a_to + D(ea.to, eb.from) + b_from,
                              a_to + D(ea.to, eb.to) + b_to});
      if (a.edge == b.edge) best = std::min(best, std::abs(a.offset - b.offset));
      return best;
    }
  }
  return 0.0;
}

CompactSet CompactSet::whole_space() { return CompactSet{}; }

CompactSet CompactSet::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() == 0 || lower.size() != upper.size())
    throw std::invalid_argument("compact set: bounds must be nonempty and of equal size");
  for (int i = 0; i < lower.size(); ++i)
    if (!(lower[i] <= upper[i]))
      throw std::invalid_argument("compact set: lower bound must not exceed upper bound");
  CompactSet k;
  k.whole_ = false;
  k.lower_ = std::move(lower);
  k.upper_ = std::move(upper);
  return k;
}

bool CompactSet::contains(const Space& space, const Point& p) const {
  if (!space.valid(p)) return false;
  if (whole_ || space.kind() != Space::Kind::Euclidean) return true;
  const auto& v = std::get<Eigen::VectorXd>(p);
  if (v.size() != lower_.size()) return false;
  for (int i = 0; i < v.size(); ++i)
    if (v[i] < lower_[i] || v[i] > upper_[i]) return false;
  return true;
}

Point sample_point(const Space& space, const CompactSet& K, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (space.kind()) {
    case Space::Kind::Euclidean: {
      const auto& lo = K.whole() ? space.lower() : K.lower();
      const auto& hi = K.whole() ? space.upper() : K.upper();
      Eigen::VectorXd x(lo.size());
      for (int i = 0; i < lo.size(); ++i) x[i] = lo[i] + unit(rng) * (hi[i] - lo[i]);
      return x;
    }
    case Space::Kind::Graph: {
      double total = 0.0;
      for (const auto& e : space.edges()) total += e.length;
      double pick = unit(rng) * total;
      for (int i = 0; i < static_cast<int>(space.edges().size()); ++i) {
        const double len = space.edges()[i].length;
        if (pick <= len || i + 1 == static_cast<int>(space.edges().size()))
          return GraphPosition{i, std::clamp(pick, 0.0, len)};
        pick -= len;
      }
      return GraphPosition{0, 0.0};
    }
    case Space::Kind::Finite: {
      std::uniform_int_distribution<int> idx(0, space.cardinality() - 1);
      return FiniteIndex{idx(rng)};
    }
  }
  return FiniteIndex{0};
}

std::string point_to_string(const Point& p) {
  std::ostringstream out;
  if (const auto* v = std::get_if<Eigen::VectorXd>(&p)) {
    out << "(";
    for (int i = 0; i < v->size(); ++i) out << (i ? "," : "") << (*v)[i];
    out << ")";
  } else if (const auto* g = std::get_if<GraphPosition>(&p)) {
    out << "edge " << g->edge << " @ " << g->offset;
  } else {
    out << "#" << std::get<FiniteIndex>(p).value;
  }
  return out.str();
}

}  // namespace popmeas
