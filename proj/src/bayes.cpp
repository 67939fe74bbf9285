#include "popmeas/bayes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "popmeas/flat_metric.hpp"

namespace popmeas {

ParamBox::ParamBox(Eigen::VectorXd lower, Eigen::VectorXd upper, std::vector<int> resolution)
    : lower_(std::move(lower)), upper_(std::move(upper)), resolution_(std::move(resolution)) {
  const int d = static_cast<int>(lower_.size());
  if (d == 0 || upper_.size() != d || static_cast<int>(resolution_.size()) != d)
    throw std::invalid_argument("parameter box: inconsistent dimensions");
  if (d > 3) throw std::invalid_argument("parameter box: grid posterior supports dim <= 3");
  node_count_ = 1;
  cell_volume_ = 1.0;
  for (int i = 0; i < d; ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || !(lower_[i] < upper_[i]))
      throw std::invalid_argument("parameter box: bounds must be finite with lower < upper");
    if (resolution_[i] < 2) throw std::invalid_argument("parameter box: resolution must be >= 2");
    node_count_ *= resolution_[i];
    cell_volume_ *= (upper_[i] - lower_[i]) / resolution_[i];
  }
}

Eigen::VectorXd ParamBox::node(int g) const {
  if (g < 0 || g >= node_count_) throw std::invalid_argument("parameter box: node index out of range");
  Eigen::VectorXd theta(dim());
  for (int i = 0; i < dim(); ++i) {
    const int r = resolution_[i];
    const int j = g % r;
    g /= r;
    theta[i] = lower_[i] + (j + 0.5) * (upper_[i] - lower_[i]) / r;
  }
  return theta;
}

bool ParamBox::same_grid(const ParamBox& other, double tol) const {
  if (dim() != other.dim() || resolution_ != other.resolution_) return false;
  return (lower_ - other.lower_).cwiseAbs().maxCoeff() <= tol &&
         (upper_ - other.upper_).cwiseAbs().maxCoeff() <= tol;
}

void validate_observation_times(const ObservationScheme& scheme, double dt, double t_end) {
  double prev = -std::numeric_limits<double>::infinity();
  for (double t : scheme.times) {
    if (!(t > prev)) throw std::invalid_argument("observation times must be strictly increasing");
    prev = t;
    if (t < -1e-12 || t > t_end + 1e-9)
      throw std::invalid_argument("observation time outside the simulated horizon");
    const double k = std::round(t / dt);
    if (std::abs(k * dt - t) > 1e-9 * std::max(1.0, std::abs(t)))
      throw std::invalid_argument("observation times must be multiples of dt");
  }
}

Eigen::MatrixXd observe(const Trajectory& traj, const ObservationScheme& scheme) {
  Eigen::MatrixXd out(scheme.rows(), scheme.cols());
  for (int m = 0; m < scheme.cols(); ++m) {
    const int k = traj.time_index(scheme.times[m]);
    for (int i = 0; i < scheme.rows(); ++i)
      out(i, m) = integrate(traj.states[k], scheme.observables[i].fn);
  }
  return out;
}

DataSet synthesize_data(const ForwardModel& forward, const Eigen::VectorXd& theta_true,
                        const ObservationScheme& scheme, std::uint64_t seed) {
  DataSet data;
  data.values = observe(forward(theta_true), scheme);
  if (const auto* gaussian = std::get_if<GaussianNoise>(&scheme.noise)) {
    if (gaussian->sigma > 0.0) {
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> normal(0.0, gaussian->sigma);
      for (int i = 0; i < data.values.rows(); ++i)
        for (int m = 0; m < data.values.cols(); ++m) data.values(i, m) += normal(rng);
    }
  } else {
    throw std::invalid_argument("synthetic data generation supports Gaussian noise only");
  }
  return data;
}

namespace {

double gaussian_log_density(const Eigen::MatrixXd& residual, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("Gaussian noise: sigma must be positive");
  const double n = static_cast<double>(residual.size());
  return -residual.squaredNorm() / (2.0 * sigma * sigma) -
         n * std::log(sigma * std::sqrt(2.0 * M_PI));
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

}  // namespace

double log_likelihood(const DataSet& data, const Eigen::VectorXd& theta,
                      const ForwardModel& forward, const ObservationScheme& scheme) {
  const Eigen::MatrixXd residual = data.values - observe(forward(theta), scheme);
  if (const auto* gaussian = std::get_if<GaussianNoise>(&scheme.noise))
    return gaussian_log_density(residual, gaussian->sigma);
  const auto& custom = std::get<CustomNoise>(scheme.noise);
  const double value = custom.density(flatten(residual));
  if (value < 0.0) throw std::invalid_argument("noise density must be nonnegative");
  return std::log(value);
}

double likelihood(const DataSet& data, const Eigen::VectorXd& theta,
                  const ForwardModel& forward, const ObservationScheme& scheme) {
  return std::exp(log_likelihood(data, theta, forward, scheme));
}

int PosteriorGrid::mode_index() const {
  int best = 0;
  for (int g = 1; g < density.size(); ++g)
    if (density[g] > density[best]) best = g;
  return best;
}

Eigen::VectorXd PosteriorGrid::mean() const {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(box.dim());
  for (int g = 0; g < density.size(); ++g)
    mean += density[g] * box.cell_volume() * box.node(g);
  return mean;
}

PosteriorGrid posterior_grid(const DataSet& data,
                             const std::function<double(const Eigen::VectorXd&)>& prior,
                             const ParamBox& box, const ForwardModel& forward,
                             const ObservationScheme& scheme, int workers) {
  if (static_cast<int>(data.values.rows()) != scheme.rows() ||
      static_cast<int>(data.values.cols()) != scheme.cols())
    throw std::invalid_argument("data matrix shape does not match the observation scheme");

  const int nodes = box.node_count();
  Eigen::VectorXd log_prior(nodes);
  double prior_mass = 0.0;
  for (int g = 0; g < nodes; ++g) {
    const double p = prior(box.node(g));
    if (!(p >= 0.0)) throw std::invalid_argument("prior density must be nonnegative");
    prior_mass += p * box.cell_volume();
    log_prior[g] = p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
  }
  if (std::abs(prior_mass - 1.0) > 1e-8)
    throw std::invalid_argument("prior does not integrate to 1 on the box");

  Eigen::VectorXd log_post(nodes);
  const int threads = std::max(1, workers);
  if (threads == 1) {
    for (int g = 0; g < nodes; ++g)
      log_post[g] = log_likelihood(data, box.node(g), forward, scheme) + log_prior[g];
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (int g = next.fetch_add(1); g < nodes; g = next.fetch_add(1))
          log_post[g] = log_likelihood(data, box.node(g), forward, scheme) + log_prior[g];
      });
    }
    for (auto& th : pool) th.join();
  }

  const double peak = log_post.maxCoeff();
  if (!std::isfinite(peak))
    throw std::runtime_error("degenerate posterior: every grid likelihood vanished");
  Eigen::VectorXd scaled(nodes);
  for (int g = 0; g < nodes; ++g)
    scaled[g] = std::isfinite(log_post[g]) ? std::exp(log_post[g] - peak) : 0.0;
  const double total = scaled.sum();

  PosteriorGrid post{box, Eigen::VectorXd(nodes)};
  post.density = scaled / (total * box.cell_volume());
  post.evidence = std::exp(peak) * total * box.cell_volume();
  post.normalization_residual =
      std::abs(post.density.sum() * box.cell_volume() - 1.0);
  return post;
}

double posterior_flat_distance(const PosteriorGrid& p, const PosteriorGrid& q, double tol) {
  if (!p.box.same_grid(q.box))
    throw std::invalid_argument("posterior flat distance requires identical grids");
  const Space space = Space::euclidean_box(p.box.lower(), p.box.upper());
  std::vector<Point> nodes;
  Eigen::VectorXd wp(p.box.node_count()), wq(p.box.node_count());
  for (int g = 0; g < p.box.node_count(); ++g) {
    nodes.push_back(p.box.node(g));
    wp[g] = p.density[g] * p.box.cell_volume();
    wq[g] = q.density[g] * q.box.cell_volume();
  }
  const DiscreteMeasure mp(nodes, wp), mq(std::move(nodes), wq);
  return flat_distance(space, mp, mq, tol);
}

}  // namespace popmeas
