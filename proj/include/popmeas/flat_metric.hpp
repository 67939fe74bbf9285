#pragma once

#include "popmeas/measure.hpp"
#include "popmeas/space.hpp"

#include <Eigen/Dense>

#include <vector>

namespace popmeas {

/// Linear program for the flat distance between two nonnegative discrete
/// measures:
///
///   maximize   sum_i coeffs_i * psi_i
///   subject to -1 <= psi_i <= 1  and  psi_i - psi_j <= dist(i,j)
///
/// over the merged union support, with coeffs_i = mu({p_i}) - nu({p_i}).
struct FlatLP {
  std::vector<Point> support;
  Eigen::VectorXd coeffs;
  Eigen::MatrixXd dist;

  int size() const { return static_cast<int>(support.size()); }
};

/// Assembles the LP from two measures, merging support points closer than
/// merge_tol so that near-zero distances never enter the constraint set.
FlatLP build_flat_lp(const Space& space, const DiscreteMeasure& mu,
                     const DiscreteMeasure& nu, double merge_tol = 1e-12);

struct FlatSolution {
  double value = 0.0;
  Eigen::VectorXd witness;  ///< optimal test function psi per support point
  int iterations = 0;
};

/// Solves the LP exactly by a dense revised simplex. The simplex walks the
/// transposed (equality-form) system, whose basis has one row per support
/// point, and recovers psi as the simplex multipliers; a phase-one is never
/// needed because the box columns form a feasible starting basis. Pivot
/// ties fall back to Bland's rule, which also takes over entirely after a
/// long degenerate stretch.
FlatSolution solve_flat_lp(const FlatLP& lp, double tol = 1e-9);

/// Brute-force LP optimum for small instances (size <= 6): enumerates all
/// basic solutions from active-constraint subsets, keeps the feasible ones
/// and returns the best objective. Independent of the simplex path.
double solve_flat_lp_oracle(const FlatLP& lp);

/// Flat (bounded-Lipschitz) distance between nonnegative measures.
double flat_distance(const Space& space, const DiscreteMeasure& mu,
                     const DiscreteMeasure& nu, double tol = 1e-9);

/// Brute-force counterpart of flat_distance; union support must be <= 6.
double flat_distance_oracle(const Space& space, const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu);

/// Flat norm of a nonnegative measure; equals its total mass.
double flat_norm(const DiscreteMeasure& mu);

}  // namespace popmeas
