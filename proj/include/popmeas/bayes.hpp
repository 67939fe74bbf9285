#pragma once

#include "popmeas/measure.hpp"
#include "popmeas/solver.hpp"
#include "popmeas/space.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace popmeas {

/// Compact parameter box with a per-axis midpoint grid.
class ParamBox {
 public:
  ParamBox(Eigen::VectorXd lower, Eigen::VectorXd upper, std::vector<int> resolution);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  const std::vector<int>& resolution() const { return resolution_; }

  int node_count() const { return node_count_; }
  Eigen::VectorXd node(int g) const;
  double cell_volume() const { return cell_volume_; }
  bool same_grid(const ParamBox& other, double tol = 1e-12) const;

 private:
  Eigen::VectorXd lower_, upper_;
  std::vector<int> resolution_;
  int node_count_ = 0;
  double cell_volume_ = 0.0;
};

struct Observable {
  std::string name;
  std::function<double(const Point&)> fn;
  double bl_norm = 1.0;  ///< declared bounded-Lipschitz norm of fn
};

struct GaussianNoise {
  double sigma = 1.0;
};

/// Noise described by an explicit density on the flattened residual,
/// with declared Hoelder regularity.
struct CustomNoise {
  std::function<double(const Eigen::VectorXd&)> density;
  double holder_exponent = 1.0;
  double holder_constant = 1.0;
};

using NoiseModel = std::variant<GaussianNoise, CustomNoise>;

struct ObservationScheme {
  std::vector<double> times;            ///< ascending, multiples of the solver dt
  std::vector<Observable> observables;  ///< rows of the data matrix
  NoiseModel noise = GaussianNoise{1.0};

  int rows() const { return static_cast<int>(observables.size()); }
  int cols() const { return static_cast<int>(times.size()); }
};

/// Checks that every observation time is a positive multiple of dt within
/// [0, t_end]; throws std::invalid_argument otherwise.
void validate_observation_times(const ObservationScheme& scheme, double dt, double t_end);

struct DataSet {
  Eigen::MatrixXd values;  ///< observables x times
};

/// Observation operator: entry (i, m) integrates observable i against the
/// trajectory state at time t_m (exact step times only).
Eigen::MatrixXd observe(const Trajectory& traj, const ObservationScheme& scheme);

/// Forward solve giving the trajectory for a parameter vector.
using ForwardModel = std::function<Trajectory(const Eigen::VectorXd&)>;

/// Synthetic data: forward observations of theta_true plus noise drawn
/// deterministically from the seed.
DataSet synthesize_data(const ForwardModel& forward, const Eigen::VectorXd& theta_true,
                        const ObservationScheme& scheme, std::uint64_t seed);

/// Noise density evaluated at the residual Y - F(G(theta)).
double likelihood(const DataSet& data, const Eigen::VectorXd& theta,
                  const ForwardModel& forward, const ObservationScheme& scheme);

/// log of the likelihood (Gaussian noise: exact log-density; custom noise:
/// log of the evaluated density).
double log_likelihood(const DataSet& data, const Eigen::VectorXd& theta,
                      const ForwardModel& forward, const ObservationScheme& scheme);

struct PosteriorGrid {
  ParamBox box;
  Eigen::VectorXd density;  ///< one value per grid node, integrates to 1
  double evidence = 0.0;    ///< midpoint estimate of the normalizer
  double normalization_residual = 0.0;

  int mode_index() const;
  Eigen::VectorXd mean() const;
};

/// Grid posterior: likelihoods accumulate in log space and a single
/// normalization makes the midpoint sum of density * cell volume equal 1.
/// The prior must integrate to 1 on the box within 1e-8. Node likelihoods
/// evaluate independently across `workers` threads.
PosteriorGrid posterior_grid(const DataSet& data,
                             const std::function<double(const Eigen::VectorXd&)>& prior,
                             const ParamBox& box, const ForwardModel& forward,
                             const ObservationScheme& scheme, int workers = 1);

/// Flat distance between two posteriors on the same grid, treating each
/// node as a Dirac with mass density * cell volume under the Euclidean
/// metric of the box.
double posterior_flat_distance(const PosteriorGrid& p, const PosteriorGrid& q,
                               double tol = 1e-9);

}  // namespace popmeas
