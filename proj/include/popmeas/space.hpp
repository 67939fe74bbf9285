#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace popmeas {

/// Position on a metric graph: a point on edge `edge` at arc length
/// `offset` from the edge's first vertex.
struct GraphPosition {
  int edge = 0;
  double offset = 0.0;
};

/// Index into the point set of a finite metric space.
struct FiniteIndex {
  int value = 0;
};

/// A state-space point. The active alternative must match the space kind:
/// coordinate vector (Euclidean box), edge position (graph), index (finite).
using Point = std::variant<Eigen::VectorXd, GraphPosition, FiniteIndex>;

struct GraphEdge {
  int from = 0;
  int to = 0;
  double length = 0.0;
};

/// A separable complete metric space given in one of three concrete forms.
/// Immutable after construction; all queries are const and thread-safe.
class Space {
 public:
  enum class Kind { Euclidean, Graph, Finite };

  /// Euclidean box [lower, upper] componentwise. The box bounds the
  /// ambient region used for sampling and net construction; points are
  /// not forced to stay inside it.
  static Space euclidean_box(Eigen::VectorXd lower, Eigen::VectorXd upper);

  /// Connected metric graph with strictly positive edge lengths.
  static Space graph(int vertex_count, std::vector<GraphEdge> edges);

  /// Finite metric space given by a symmetric distance matrix with zero
  /// diagonal satisfying the triangle inequality.
  static Space finite(Eigen::MatrixXd distances);

  Kind kind() const { return kind_; }

  /// Axes of the Euclidean box (0 for graph/finite spaces).
  int dimension() const;

  /// Number of points (finite space) or vertices (graph).
  int cardinality() const;

  double distance(const Point& p, const Point& q) const;

  bool valid(const Point& p) const;

  /// Throws std::invalid_argument when `p` does not belong to this space.
  void require_valid(const Point& p) const;

  const Eigen::VectorXd& lower() const { return euclidean_.lower; }
  const Eigen::VectorXd& upper() const { return euclidean_.upper; }
  const std::vector<GraphEdge>& edges() const { return graph_.edges; }
  int vertex_count() const { return graph_.vertex_count; }
  /// All-pairs vertex distances (graph spaces).
  const Eigen::MatrixXd& vertex_distances() const { return graph_.vertex_dist; }
  const Eigen::MatrixXd& distance_matrix() const { return finite_.dist; }

 private:
  Space() = default;

  struct EuclideanData {
    Eigen::VectorXd lower, upper;
  };
  struct GraphData {
    int vertex_count = 0;
    std::vector<GraphEdge> edges;
    Eigen::MatrixXd vertex_dist;
  };
  struct FiniteData {
    Eigen::MatrixXd dist;
  };

  Kind kind_ = Kind::Euclidean;
  EuclideanData euclidean_;
  GraphData graph_;
  FiniteData finite_;
};

/// Compact subset used as the working region K. For Euclidean spaces an
/// axis-aligned box; graph and finite spaces always use the whole space.
class CompactSet {
 public:
  static CompactSet whole_space();
  static CompactSet box(Eigen::VectorXd lower, Eigen::VectorXd upper);

  bool whole() const { return whole_; }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }

  bool contains(const Space& space, const Point& p) const;

 private:
  bool whole_ = true;
  Eigen::VectorXd lower_, upper_;
};

/// Uniform sample from K (Euclidean box: uniform in the box; graph:
/// length-weighted uniform over edges; finite: uniform over indices).
Point sample_point(const Space& space, const CompactSet& K, std::mt19937_64& rng);

/// Human-readable point rendering for diagnostics.
std::string point_to_string(const Point& p);

}  // namespace popmeas
