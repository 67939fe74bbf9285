#include "popmeas/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace popmeas {

namespace {

Eigen::VectorXd rk4_flow(const OdeFlowTransport& flow, double t1, double t0,
                         Eigen::VectorXd x, const DiscreteMeasure& frozen) {
  const int steps = std::max(1, flow.substeps);
  const double h = (t1 - t0) / steps;
  double t = t0;
  for (int s = 0; s < steps; ++s) {
    const Eigen::VectorXd k1 = flow.field(t, x, frozen);
    const Eigen::VectorXd k2 = flow.field(t + 0.5 * h, x + 0.5 * h * k1, frozen);
    const Eigen::VectorXd k3 = flow.field(t + 0.5 * h, x + 0.5 * h * k2, frozen);
    const Eigen::VectorXd k4 = flow.field(t + h, x + h * k3, frozen);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return x;
}

}  // namespace

Point TransportMap::apply(const Space& space, double t1, double t0, const Point& x,
                          const DiscreteMeasure& frozen) const {
  if (std::holds_alternative<IdentityTransport>(rule)) return x;
  if (const auto* explicit_map = std::get_if<ExplicitTransport>(&rule)) {
    Point moved = explicit_map->map(t1, t0, x, frozen);
    space.require_valid(moved);
    return moved;
  }
  const auto& flow = std::get<OdeFlowTransport>(rule);
  if (space.kind() != Space::Kind::Euclidean)
    throw std::invalid_argument("ode-flow transport requires a Euclidean space");
  return rk4_flow(flow, t1, t0, std::get<Eigen::VectorXd>(x), frozen);
}

Eigen::VectorXd finite_range_coefficients(const EpsilonNet& net, const SourceMeasure& image) {
  const Space& space = net.space();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(net.size());
  if (const auto* mu = std::get_if<DiscreteMeasure>(&image)) {
    for (int j = 0; j < mu->size(); ++j) beta += mu->weights[j] * net.partition(mu->points[j]);
    return beta;
  }
  if (const auto* cloud = std::get_if<SampleCloudSource>(&image)) {
    for (const auto& p : cloud->points) beta += cloud->point_weight * net.partition(p);
    return beta;
  }
  const auto& density = std::get<DensitySource>(image);
  if (space.kind() != Space::Kind::Euclidean)
    throw std::invalid_argument("density kernel images require a Euclidean space");
  const auto& lo = net.cover_set().whole() ? space.lower() : net.cover_set().lower();
  const auto& hi = net.cover_set().whole() ? space.upper() : net.cover_set().upper();
  const int dim = static_cast<int>(lo.size());
  double cell_volume = 1.0;
  for (int i = 0; i < dim; ++i) cell_volume *= (hi[i] - lo[i]) / density.resolution;
  std::vector<int> idx(dim, 0);
  while (true) {
    Eigen::VectorXd x(dim);
    for (int i = 0; i < dim; ++i)
      x[i] = lo[i] + (idx[i] + 0.5) * (hi[i] - lo[i]) / density.resolution;
    const double f = density.density(x);
    if (!std::isfinite(f)) throw std::runtime_error("kernel density produced a non-finite value");
    if (f < 0.0) throw std::invalid_argument("kernel images must be nonnegative");
    beta += (f * cell_volume) * net.partition(x);
    int axis = dim - 1;
    while (axis >= 0 && ++idx[axis] >= density.resolution) idx[axis--] = 0;
    if (axis < 0) break;
  }
  return beta;
}

FiniteRangeKernel discretize_kernel(const LinearKernel& kernel,
                                    const std::shared_ptr<const EpsilonNet>& net) {
  FiniteRangeKernel out;
  out.mass_bound = kernel.mass_bound;
  out.coefficients = [net, image = kernel.image](double t, const Point& x,
                                                 const DiscreteMeasure&) {
    const SourceMeasure value = image(t, x);
    if (const auto* mu = std::get_if<DiscreteMeasure>(&value)) {
      for (int j = 0; j < mu->size(); ++j)
        if (mu->weights[j] < 0.0)
          throw std::invalid_argument("linear kernel produced negative mass");
    }
    return finite_range_coefficients(*net, value);
  };
  return out;
}

FiniteRangeInflux discretize_influx(const std::function<SourceMeasure(double)>& influx,
                                    double mass_bound,
                                    const std::shared_ptr<const EpsilonNet>& net) {
  FiniteRangeInflux out;
  out.mass_bound = mass_bound;
  out.coefficients = [net, influx](double t, const DiscreteMeasure&) {
    return finite_range_coefficients(*net, influx(t));
  };
  return out;
}

bool ValidationReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

ValidationReport validate_model(const ModelSpec& model, double dt, std::uint64_t seed) {
  ValidationReport report;
  const auto& net = *model.net;
  const Space& space = net.space();
  std::mt19937_64 rng(seed);
  const int samples = 32;

  std::vector<Point> probe;
  for (int s = 0; s < samples; ++s) probe.push_back(sample_point(space, net.cover_set(), rng));
  DiscreteMeasure state(std::vector<Point>{probe[0]}, Eigen::VectorXd::Ones(1));

  {  // growth bound: sampled |c| against the declared bound
    double worst = 0.0;
    for (const auto& x : probe)
      worst = std::max(worst, std::abs(model.growth(0.0, x, state)));
    const bool ok = model.growth.zero() || worst <= model.growth.sup_bound + 1e-9;
    std::ostringstream detail;
    detail << "sampled sup |c| = " << worst << ", declared " << model.growth.sup_bound;
    report.checks.push_back({"growth_bound", ok, detail.str()});
  }
  {  // positivity guard for the explicit mass update
    const double product = dt * model.growth.sup_bound;
    std::ostringstream detail;
    detail << "dt * sup|c| = " << product << " (must be <= 0.5)";
    report.checks.push_back({"step_positivity", product <= 0.5 + 1e-12, detail.str()});
  }
  {  // transport semigroup property on sampled points and times
    double worst = 0.0;
    for (const auto& x : probe) {
      const Point direct = model.transport.apply(space, 2.0 * dt, 0.0, x, state);
      const Point mid = model.transport.apply(space, dt, 0.0, x, state);
      const Point chained = model.transport.apply(space, 2.0 * dt, dt, mid, state);
      worst = std::max(worst, space.distance(direct, chained));
    }
    std::ostringstream detail;
    detail << "max composition defect = " << worst;
    report.checks.push_back({"transport_semigroup", worst <= 1e-8, detail.str()});
  }
  if (model.kernel) {
    double low = 0.0;
    for (const auto& x : probe)
      low = std::min(low, model.kernel->coefficients(0.0, x, state).minCoeff());
    std::ostringstream detail;
    detail << "min kernel coefficient = " << low;
    report.checks.push_back({"kernel_nonnegative", low >= -1e-12, detail.str()});
  }
  if (model.influx) {
    const double low = model.influx->coefficients(0.0, state).minCoeff();
    std::ostringstream detail;
    detail << "min influx coefficient = " << low;
    report.checks.push_back({"influx_nonnegative", low >= -1e-12, detail.str()});
  }
  {
    const double a = model.growth.holder_exponent;
    std::ostringstream detail;
    detail << "time exponent = " << a;
    report.checks.push_back({"time_exponent", a > 0.0 && a <= 1.0, detail.str()});
  }
  return report;
}

}  // namespace popmeas
