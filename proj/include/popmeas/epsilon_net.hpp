#pragma once

#include "popmeas/space.hpp"

#include <Eigen/Dense>

#include <vector>

namespace popmeas {

/// Finite net of centers covering a compact set K, together with the
/// Lipschitz partition of unity subordinate to the balls B_radius(z_l).
///
/// The partition uses hat bumps h_l(x) = max(0, 1 - d(x, z_l)/radius),
/// their sum S(x), and
///
///   phi_l(x) = h_l(x)/max(S(x), cutoff),
///
/// which equals h_l/S wherever S >= cutoff and fades to zero with S
/// elsewhere. Centers are built (radius/2)-dense in K, so S >= 1/2 on K
/// and the phi_l sum to one there while staying globally Lipschitz.
class EpsilonNet {
 public:
  EpsilonNet(Space space, CompactSet cover, std::vector<Point> centers,
             double radius, double cutoff = 0.5);

  int size() const { return static_cast<int>(centers_.size()); }
  const std::vector<Point>& centers() const { return centers_; }
  const Point& center(int l) const { return centers_[l]; }
  double radius() const { return radius_; }
  double cutoff() const { return cutoff_; }
  const Space& space() const { return space_; }
  const CompactSet& cover_set() const { return cover_; }

  /// Upper bound on the Lipschitz constant of every phi_l, derived from
  /// the radius, the cutoff and the center packing. Finite by construction.
  double lipschitz_bound() const { return lipschitz_bound_; }

  /// Hat values h_l(x), l = 1..L.
  Eigen::VectorXd hat_values(const Point& x) const;

  /// Partition values phi_l(x). Entry l is exactly zero whenever
  /// d(x, z_l) >= radius; the sum is 1 on K and within [0, 1] everywhere.
  Eigen::VectorXd partition(const Point& x) const;

  /// Index of the nearest center and its distance.
  std::pair<int, double> nearest_center(const Point& x) const;

 private:
  Space space_;
  CompactSet cover_;
  std::vector<Point> centers_;
  double radius_ = 0.0;
  double cutoff_ = 0.5;
  double lipschitz_bound_ = 0.0;
};

/// Builds a net whose centers are (epsilon/2)-dense in K. Euclidean boxes
/// are gridded with axis step epsilon/(2 sqrt(d)), graph edges are split
/// into segments of length at most epsilon/2, and finite spaces use every
/// point.
EpsilonNet build_epsilon_net(const Space& space, const CompactSet& K,
                             double epsilon, double cutoff = 0.5);

}  // namespace popmeas
