#pragma once

#include "popmeas/epsilon_net.hpp"
#include "popmeas/measure.hpp"
#include "popmeas/space.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace popmeas {

/// Scalar growth/decay rate c(t, x, mu) with declared regularity data.
struct GrowthFn {
  std::function<double(double, const Point&, const DiscreteMeasure&)> rate;
  double sup_bound = 0.0;       ///< declared bound on |c|
  double holder_exponent = 1.0; ///< time regularity exponent in (0,1]
  double holder_constant = 0.0;

  double operator()(double t, const Point& x, const DiscreteMeasure& mu) const {
    return rate ? rate(t, x, mu) : 0.0;
  }
  bool zero() const { return !rate; }
};

/// Measure-valued kernel that does not depend on the solution measure.
/// The image may be a discrete measure or a Euclidean density.
struct LinearKernel {
  std::function<SourceMeasure(double, const Point&)> image;
  double mass_bound = 0.0;  ///< declared bound on the image mass
};

/// Non-local transition kernel already reduced to the net centers:
/// coefficient l is the mass the kernel deposits at center z_l.
struct FiniteRangeKernel {
  std::function<Eigen::VectorXd(double, const Point&, const DiscreteMeasure&)> coefficients;
  double mass_bound = 0.0;
};

/// Influx reduced to the net centers.
struct FiniteRangeInflux {
  std::function<Eigen::VectorXd(double, const DiscreteMeasure&)> coefficients;
  double mass_bound = 0.0;
};

struct IdentityTransport {};

struct ExplicitTransport {
  std::function<Point(double, double, const Point&, const DiscreteMeasure&)> map;
};

/// Flow of a vector field on a Euclidean space, integrated by fixed-step
/// RK4 with `substeps` steps per transport interval.
struct OdeFlowTransport {
  std::function<Eigen::VectorXd(double, const Eigen::VectorXd&, const DiscreteMeasure&)> field;
  int substeps = 16;
};

struct TransportMap {
  std::variant<IdentityTransport, ExplicitTransport, OdeFlowTransport> rule;
  double lip_rate = 0.0;    ///< d(X(t)x, X(t)y) <= e^{rate t} d(x,y)
  double time_slope = 0.0;  ///< d(X(t)x, x) <= slope * t

  bool is_identity() const { return std::holds_alternative<IdentityTransport>(rule); }
  Point apply(const Space& space, double t1, double t0, const Point& x,
              const DiscreteMeasure& frozen) const;
};

struct ModelSpec {
  GrowthFn growth;
  std::optional<FiniteRangeKernel> kernel;
  std::optional<FiniteRangeInflux> influx;
  TransportMap transport;
  std::shared_ptr<const EpsilonNet> net;

  // Declared Lipschitz-in-measure constants, echoed into reports.
  double lip_growth_measure = 0.0;
  double lip_kernel_measure = 0.0;
  double lip_influx_measure = 0.0;

  const Space& space() const { return net->space(); }
};

/// Reduces a linear kernel to the net centers: coefficient l is the
/// partition-weighted mass integral of the kernel image. Exact sums for
/// discrete images, midpoint quadrature for densities.
FiniteRangeKernel discretize_kernel(const LinearKernel& kernel,
                                    const std::shared_ptr<const EpsilonNet>& net);

/// Same reduction for a linear influx.
FiniteRangeInflux discretize_influx(const std::function<SourceMeasure(double)>& influx,
                                    double mass_bound,
                                    const std::shared_ptr<const EpsilonNet>& net);

/// Partition-weighted center coefficients of a single measure or density.
Eigen::VectorXd finite_range_coefficients(const EpsilonNet& net, const SourceMeasure& image);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_passed() const;
};

/// Samples the model assumptions that the scheme relies on: the step-size
/// positivity guard dt * sup|c| <= 1/2, the transport semigroup property,
/// nonnegative kernel/influx coefficients and a valid time exponent.
/// Report-only; callers decide whether a failure blocks the run.
ValidationReport validate_model(const ModelSpec& model, double dt,
                                std::uint64_t seed = 20240901);

}  // namespace popmeas
