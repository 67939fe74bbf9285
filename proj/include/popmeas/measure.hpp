#pragma once

#include "popmeas/epsilon_net.hpp"
#include "popmeas/space.hpp"

#include <Eigen/Dense>

#include <functional>
#include <variant>
#include <vector>

namespace popmeas {

/// Finite nonnegative measure as a weighted sum of Dirac masses.
/// Immutable value semantics: every operation returns a new measure.
struct DiscreteMeasure {
  std::vector<Point> points;
  Eigen::VectorXd weights;

  DiscreteMeasure() : weights(0) {}
  DiscreteMeasure(std::vector<Point> pts, Eigen::VectorXd w);

  int size() const { return static_cast<int>(points.size()); }
  bool empty() const { return points.empty(); }

  static DiscreteMeasure dirac(Point p, double mass);
};

/// Total mass; coincides with the flat norm for nonnegative measures.
double total_mass(const DiscreteMeasure& mu);

/// Push-forward along a point map: support moves, weights are unchanged.
DiscreteMeasure push_forward(const DiscreteMeasure& mu,
                             const std::function<Point(const Point&)>& f);

/// Integral of psi against mu.
double integrate(const DiscreteMeasure& mu,
                 const std::function<double(const Point&)>& psi);

/// Merges points within merge_tol (weights summed onto the first-seen
/// point), then drops weights strictly below weight_tol.
DiscreteMeasure prune(const Space& space, const DiscreteMeasure& mu,
                      double weight_tol, double merge_tol);

/// Density on a Euclidean box, integrated by midpoint quadrature with
/// `resolution` nodes per axis.
struct DensitySource {
  std::function<double(const Point&)> density;
  int resolution = 256;
};

/// Finite point cloud with one weight per point (all equal by default).
struct SampleCloudSource {
  std::vector<Point> points;
  double point_weight = 1.0;
};

using SourceMeasure = std::variant<DiscreteMeasure, DensitySource, SampleCloudSource>;

/// Projects a source measure onto the net centers: each center receives
/// the source mass of its cell, the part of B_radius(z_l) inside K not
/// claimed by an earlier center. Mass outside K is discarded.
DiscreteMeasure approximate_initial(const Space& space, const EpsilonNet& net,
                                    const SourceMeasure& source);

}  // namespace popmeas
