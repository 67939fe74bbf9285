#include "popmeas/measure.hpp"

#include <cmath>
#include <stdexcept>

namespace popmeas {

DiscreteMeasure::DiscreteMeasure(std::vector<Point> pts, Eigen::VectorXd w)
    : points(std::move(pts)), weights(std::move(w)) {
  if (static_cast<int>(points.size()) != weights.size())
    throw std::invalid_argument("measure: support and weights must have equal length");
  for (int j = 0; j < weights.size(); ++j) {
    if (!std::isfinite(weights[j]))
      throw std::invalid_argument("measure: weights must be finite");
    if (weights[j] < 0.0)
      throw std::invalid_argument("measure: weights must be nonnegative");
  }
}

DiscreteMeasure DiscreteMeasure::dirac(Point p, double mass) {
  Eigen::VectorXd w(1);
  w[0] = mass;
  return DiscreteMeasure({std::move(p)}, std::move(w));
}

double total_mass(const DiscreteMeasure& mu) { return mu.weights.sum(); }

DiscreteMeasure push_forward(const DiscreteMeasure& mu,
                             const std::function<Point(const Point&)>& f) {
  std::vector<Point> moved;
  moved.reserve(mu.points.size());
  for (const auto& p : mu.points) moved.push_back(f(p));
  return DiscreteMeasure(std::move(moved), mu.weights);
}

double integrate(const DiscreteMeasure& mu,
                 const std::function<double(const Point&)>& psi) {
  double sum = 0.0;
  for (int j = 0; j < mu.size(); ++j) sum += mu.weights[j] * psi(mu.points[j]);
  return sum;
}

DiscreteMeasure prune(const Space& space, const DiscreteMeasure& mu,
                      double weight_tol, double merge_tol) {
  if (weight_tol < 0.0 || merge_tol < 0.0)
    throw std::invalid_argument("prune: tolerances must be nonnegative");
  std::vector<Point> kept;
  std::vector<double> mass;
  kept.reserve(mu.points.size());
  for (int j = 0; j < mu.size(); ++j) {
    int target = -1;
    for (int k = 0; k < static_cast<int>(kept.size()); ++k) {
      if (space.distance(kept[k], mu.points[j]) <= merge_tol) {
        target = k;
        break;
      }
    }
    if (target >= 0) {
      mass[target] += mu.weights[j];
    } else {
      kept.push_back(mu.points[j]);
      mass.push_back(mu.weights[j]);
    }
  }
  std::vector<Point> pts;
  std::vector<double> w;
  for (int k = 0; k < static_cast<int>(kept.size()); ++k) {
    if (mass[k] < weight_tol) continue;
    pts.push_back(std::move(kept[k]));
    w.push_back(mass[k]);
  }
  Eigen::VectorXd weights(static_cast<int>(w.size()));
  for (int k = 0; k < weights.size(); ++k) weights[k] = w[k];
  return DiscreteMeasure(std::move(pts), std::move(weights));
}

namespace {

// Deposits w into the greedy cell of x: the first center whose open ball
// contains x. Mass outside K is discarded; a K point outside every ball
// means the net does not cover K.
void deposit(const Space& space, const EpsilonNet& net, const Point& x, double w,
             Eigen::VectorXd& cell_mass) {
  if (!net.cover_set().contains(space, x)) return;
  for (int l = 0; l < net.size(); ++l) {
    if (space.distance(x, net.center(l)) < net.radius()) {
      cell_mass[l] += w;
      return;
    }
  }
  throw std::runtime_error("net does not cover K at " + point_to_string(x));
}

}  // namespace

DiscreteMeasure approximate_initial(const Space& space, const EpsilonNet& net,
                                    const SourceMeasure& source) {
  Eigen::VectorXd cell_mass = Eigen::VectorXd::Zero(net.size());
  if (const auto* mu = std::get_if<DiscreteMeasure>(&source)) {
    for (int j = 0; j < mu->size(); ++j)
      deposit(space, net, mu->points[j], mu->weights[j], cell_mass);
  } else if (const auto* cloud = std::get_if<SampleCloudSource>(&source)) {
    for (const auto& p : cloud->points)
      deposit(space, net, p, cloud->point_weight, cell_mass);
  } else {
    const auto& src = std::get<DensitySource>(source);
    if (space.kind() != Space::Kind::Euclidean)
      throw std::invalid_argument("density sources require a Euclidean space");
    if (src.resolution < 1)
      throw std::invalid_argument("density source: resolution must be >= 1");
    const auto& lo = net.cover_set().whole() ? space.lower() : net.cover_set().lower();
    const auto& hi = net.cover_set().whole() ? space.upper() : net.cover_set().upper();
    const int dim = static_cast<int>(lo.size());
    double cell_volume = 1.0;
    for (int i = 0; i < dim; ++i) cell_volume *= (hi[i] - lo[i]) / src.resolution;
    std::vector<int> idx(dim, 0);
    while (true) {
      Eigen::VectorXd x(dim);
      for (int i = 0; i < dim; ++i)
        x[i] = lo[i] + (idx[i] + 0.5) * (hi[i] - lo[i]) / src.resolution;
      const double f = src.density(x);
      if (!std::isfinite(f)) throw std::runtime_error("density source produced a non-finite value");
      if (f < 0.0) throw std::invalid_argument("density source must be nonnegative on K");
      deposit(space, net, x, f * cell_volume, cell_mass);
      int axis = dim - 1;
      while (axis >= 0 && ++idx[axis] >= src.resolution) idx[axis--] = 0;
      if (axis < 0) break;
    }
  }
  std::vector<Point> pts;
  std::vector<double> w;
  for (int l = 0; l < net.size(); ++l) {
    if (cell_mass[l] > 0.0) {
      pts.push_back(net.center(l));
      w.push_back(cell_mass[l]);
    }
  }
  Eigen::VectorXd weights(static_cast<int>(w.size()));
  for (int k = 0; k < weights.size(); ++k) weights[k] = w[k];
  return DiscreteMeasure(std::move(pts), std::move(weights));
}

}  // namespace popmeas
