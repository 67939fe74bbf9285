#include "popmeas/solver.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "popmeas/flat_metric.hpp"

namespace popmeas {

int Trajectory::time_index(double t) const {
  for (int k = 0; k < static_cast<int>(times.size()); ++k)
    if (std::abs(times[k] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return k;
  throw std::invalid_argument("time " + std::to_string(t) + " is not a recorded step time");
}

DiscreteMeasure transport_step(const Space& space, const DiscreteMeasure& mu,
                               const TransportMap& transport,
                               const DiscreteMeasure& frozen, double t, double dt) {
  if (transport.is_identity()) return mu;
  return push_forward(mu, [&](const Point& x) {
    return transport.apply(space, t + dt, t, x, frozen);
  });
}

DiscreteMeasure growth_step(const ModelSpec& model, const DiscreteMeasure& transported,
                            const DiscreteMeasure& frozen, double t, double dt,
                            double merge_tol) {
  const auto& net = *model.net;
  const Space& space = net.space();
  const int L = net.size();
  const int J = transported.size();

  // Identify transported points with coinciding centers.
  std::vector<int> matched_center(J, -1);
  Eigen::VectorXd carried = Eigen::VectorXd::Zero(L);
  for (int i = 0; i < J; ++i) {
    const auto [l, d] = net.nearest_center(transported.points[i]);
    if (d <= merge_tol) {
      matched_center[i] = l;
      carried[l] += transported.weights[i];
    }
  }

  // Inflow at the centers from the kernel and the influx, evaluated at the
  // transported locations with the pre-step masses.
  Eigen::VectorXd inflow = Eigen::VectorXd::Zero(L);
  if (model.kernel) {
    for (int i = 0; i < J; ++i)
      inflow += transported.weights[i] *
                model.kernel->coefficients(t, transported.points[i], frozen);
  }
  if (model.influx) inflow += model.influx->coefficients(t, frozen);

  std::vector<Point> points;
  std::vector<double> mass;
  points.reserve(J + L);
  auto check = [&](double m, const Point& where) {
    if (m < 0.0) {
      throw std::runtime_error("growth step produced negative mass " +
                               std::to_string(m) + " at " + point_to_string(where));
    }
  };
  for (int i = 0; i < J; ++i) {
    if (matched_center[i] >= 0) continue;
    const double rate = model.growth(t, transported.points[i], frozen);
    const double m = transported.weights[i] * (1.0 + dt * rate);
    check(m, transported.points[i]);
    points.push_back(transported.points[i]);
    mass.push_back(m);
  }
  for (int l = 0; l < L; ++l) {
    const double gain = dt * inflow[l];
    if (carried[l] == 0.0 && gain == 0.0) continue;
    const double rate = model.growth(t, net.center(l), frozen);
    const double m = carried[l] * (1.0 + dt * rate) + gain;
    check(m, net.center(l));
    points.push_back(net.center(l));
    mass.push_back(m);
  }
  Eigen::VectorXd weights(static_cast<int>(mass.size()));
  for (int k = 0; k < weights.size(); ++k) weights[k] = mass[k];
  return DiscreteMeasure(std::move(points), std::move(weights));
}

Trajectory simulate(const ModelSpec& model, const DiscreteMeasure& mu0,
                    const SolverConfig& config) {
  if (!(config.dt > 0.0) || !(config.t_end > 0.0))
    throw std::invalid_argument("solver: dt and t_end must be positive");
  if (config.dt > config.t_end + 1e-12)
    throw std::invalid_argument("solver: dt must not exceed t_end");
  const Space& space = model.space();
  for (const auto& p : mu0.points) space.require_valid(p);

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(mu0);
  DiscreteMeasure state = mu0;
  double t = 0.0;
  for (int k = 0; t < config.t_end - 1e-12 * std::max(1.0, config.t_end); ++k) {
    const double next = std::min(config.t_end, (k + 1) * config.dt);
    const double dt = next - t;
    const DiscreteMeasure frozen = state;
    DiscreteMeasure moved = transport_step(space, state, model.transport, frozen, t, dt);
    state = growth_step(model, moved, frozen, t, dt, config.merge_tol);
    state = prune(space, state, config.weight_tol, config.merge_tol);
    t = next;
    traj.times.push_back(t);
    traj.states.push_back(state);
  }
  return traj;
}

DiscreteMeasure apply_transport_semigroup(const FrozenModel& model,
                                          const DiscreteMeasure& mu, double t) {
  if (!model.transport) return mu;
  return push_forward(mu, [&](const Point& x) { return model.transport(t, x); });
}

DiscreteMeasure apply_reaction_semigroup(const FrozenModel& model,
                                         const DiscreteMeasure& mu, double t,
                                         int inner_steps, double merge_tol) {
  if (inner_steps < 1) throw std::invalid_argument("reaction semigroup: inner steps must be >= 1");
  const auto& net = *model.net;
  const int L = net.size();

  // Joint support: free points of mu plus every center; mu points that
  // coincide with a center fold into it.
  std::vector<Point> support;
  Eigen::VectorXd m0;
  {
    std::vector<double> w;
    Eigen::VectorXd center_mass = Eigen::VectorXd::Zero(L);
    for (int j = 0; j < mu.size(); ++j) {
      const auto [l, d] = net.nearest_center(mu.points[j]);
      if (d <= merge_tol) {
        center_mass[l] += mu.weights[j];
      } else {
        support.push_back(mu.points[j]);
        w.push_back(mu.weights[j]);
      }
    }
    for (int l = 0; l < L; ++l) {
      support.push_back(net.center(l));
      w.push_back(center_mass[l]);
    }
    m0.resize(static_cast<int>(w.size()));
    for (int k = 0; k < m0.size(); ++k) m0[k] = w[k];
  }
  const int n = static_cast<int>(support.size());
  const int center_base = n - L;

  // Linear system dm/dt = A m + b on the fixed support.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k)
    if (model.growth) a(k, k) = model.growth(support[k]);
  if (model.kernel) {
    for (int y = 0; y < n; ++y) {
      const Eigen::VectorXd beta = model.kernel(support[y]);
      for (int l = 0; l < L; ++l) a(center_base + l, y) += beta[l];
    }
  }
  if (model.influx.size() == L)
    for (int l = 0; l < L; ++l) b[center_base + l] = model.influx[l];

  Eigen::VectorXd m = m0;
  const double h = t / inner_steps;
  for (int s = 0; s < inner_steps; ++s) {
    const Eigen::VectorXd k1 = a * m + b;
    const Eigen::VectorXd k2 = a * (m + 0.5 * h * k1) + b;
    const Eigen::VectorXd k3 = a * (m + 0.5 * h * k2) + b;
    const Eigen::VectorXd k4 = a * (m + h * k3) + b;
    m += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  std::vector<Point> pts;
  std::vector<double> w;
  for (int k = 0; k < n; ++k) {
    if (m[k] == 0.0) continue;
    if (m[k] < 0.0 && m[k] > -1e-13) continue;
    pts.push_back(support[k]);
    w.push_back(m[k]);
  }
  Eigen::VectorXd weights(static_cast<int>(w.size()));
  for (int k = 0; k < weights.size(); ++k) weights[k] = w[k];
  return DiscreteMeasure(std::move(pts), std::move(weights));
}

double commutator_defect(const FrozenModel& model, const DiscreteMeasure& mu,
                         double t, double lp_tol) {
  const DiscreteMeasure transport_last =
      apply_transport_semigroup(model, apply_reaction_semigroup(model, mu, t), t);
  const DiscreteMeasure reaction_last =
      apply_reaction_semigroup(model, apply_transport_semigroup(model, mu, t), t);
  return flat_distance(model.space(), transport_last, reaction_last, lp_tol);
}

}  // namespace popmeas
