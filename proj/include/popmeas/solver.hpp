#pragma once

#include "popmeas/measure.hpp"
#include "popmeas/model.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace popmeas {

struct SolverConfig {
  double dt = 0.1;
  double t_end = 1.0;
  double merge_tol = 1e-9;
  double weight_tol = 0.0;
  int ode_substeps = 16;
};

/// Time-indexed states of one run, one entry per executed step plus the
/// initial state.
struct Trajectory {
  std::vector<double> times;
  std::vector<DiscreteMeasure> states;

  int steps() const { return static_cast<int>(times.size()) - 1; }
  const DiscreteMeasure& final_state() const { return states.back(); }
  /// Index of the recorded time matching t (within 1e-9 absolute+relative);
  /// throws when t was not a step boundary.
  int time_index(double t) const;
};

/// Moves every support point along the transport map over [t, t+dt] with
/// the model frozen at `frozen`; weights are untouched, so the total mass
/// is conserved exactly.
DiscreteMeasure transport_step(const Space& space, const DiscreteMeasure& mu,
                               const TransportMap& transport,
                               const DiscreteMeasure& frozen, double t, double dt);

/// Explicit mass update at the transported points and the net centers.
/// Transported points within merge_tol of a center are identified with it
/// before the update. Every surviving point x gains dt*c(t,x)*m(x); center
/// z_l additionally gains dt*(sum_i beta_l(x_i) m_i + n_l), where the sum
/// runs over the transported points with their pre-step masses.
DiscreteMeasure growth_step(const ModelSpec& model, const DiscreteMeasure& transported,
                            const DiscreteMeasure& frozen, double t, double dt,
                            double merge_tol);

/// Runs the alternating transport / growth scheme from t = 0 to t_end,
/// pruning after each step; a shortened final step lands exactly on t_end.
Trajectory simulate(const ModelSpec& model, const DiscreteMeasure& mu0,
                    const SolverConfig& config);

/// Autonomous, measure-independent model functions for the semigroup
/// experiments: a transport flow by duration, a growth rate, kernel
/// coefficients per center and a fixed influx vector.
struct FrozenModel {
  std::function<Point(double, const Point&)> transport;  ///< duration, point
  std::function<double(const Point&)> growth;
  std::function<Eigen::VectorXd(const Point&)> kernel;   ///< beta(x), length L
  Eigen::VectorXd influx;                                ///< length L (may be empty)
  std::shared_ptr<const EpsilonNet> net;

  const Space& space() const { return net->space(); }
};

/// Pure transport semigroup: push-forward by the duration-t flow.
DiscreteMeasure apply_transport_semigroup(const FrozenModel& model,
                                          const DiscreteMeasure& mu, double t);

/// Growth/jump/influx semigroup: solves the linear mass system on the
/// support extended by the net centers with RK4 (`inner_steps` >= 64 gives
/// a reference-quality solution).
DiscreteMeasure apply_reaction_semigroup(const FrozenModel& model,
                                         const DiscreteMeasure& mu, double t,
                                         int inner_steps = 64,
                                         double merge_tol = 1e-9);

/// Flat distance between the two orders of applying the semigroups for
/// duration t; decays like t^2 for regular models.
double commutator_defect(const FrozenModel& model, const DiscreteMeasure& mu,
                         double t, double lp_tol = 1e-9);

}  // namespace popmeas
