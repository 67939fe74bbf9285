#include "popmeas/model_library.hpp"

#include <cmath>
#include <stdexcept>

namespace popmeas {

namespace {

Eigen::VectorXd parse_vector(const json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("expected a nonempty numeric array");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

std::string name_of(const json& cfg) {
  if (!cfg.is_object() || !cfg.contains("name"))
    throw std::invalid_argument("model piece needs a \"name\" field");
  return cfg.at("name").get<std::string>();
}

}  // namespace

GrowthFn make_growth(const json& cfg) {
  const std::string name = name_of(cfg);
  GrowthFn growth;
  if (name == "none") return growth;
  if (name == "constant_growth") {
    const double rate = cfg.at("rate").get<double>();
    growth.rate = [rate](double, const Point&, const DiscreteMeasure&) { return rate; };
    growth.sup_bound = cfg.value("sup_bound", std::abs(rate));
    return growth;
  }
  if (name == "logistic_total_mass_growth") {
    const double rate = cfg.at("rate").get<double>();
    const double capacity = cfg.at("capacity").get<double>();
    if (!(capacity > 0.0)) throw std::invalid_argument("logistic growth: capacity must be positive");
    growth.rate = [rate, capacity](double, const Point&, const DiscreteMeasure& mu) {
      return rate * (1.0 - total_mass(mu) / capacity);
    };
    growth.sup_bound = cfg.value("sup_bound", 2.0 * std::abs(rate));
    return growth;
  }
  throw std::invalid_argument("unknown growth model: " + name);
}

std::optional<FiniteRangeKernel> make_kernel(const json& cfg,
                                             const std::shared_ptr<const EpsilonNet>& net) {
  const std::string name = name_of(cfg);
  if (name == "none") return std::nullopt;
  if (name == "cell_division_kernel") {
    if (net->space().kind() != Space::Kind::Euclidean)
      throw std::invalid_argument("cell_division_kernel requires a Euclidean space");
    const double amplitude = cfg.value("amplitude", 2.0);
    if (amplitude < 0.0) throw std::invalid_argument("cell_division_kernel: amplitude must be >= 0");
    LinearKernel kernel;
    kernel.mass_bound = amplitude;
    kernel.image = [amplitude](double, const Point& x) -> SourceMeasure {
      const auto& v = std::get<Eigen::VectorXd>(x);
      return DiscreteMeasure::dirac(Eigen::VectorXd(0.5 * v), amplitude);
    };
    return discretize_kernel(kernel, net);
  }
  throw std::invalid_argument("unknown kernel model: " + name);
}

std::optional<FiniteRangeInflux> make_influx(const json& cfg,
                                             const std::shared_ptr<const EpsilonNet>& net) {
  const std::string name = name_of(cfg);
  if (name == "none") return std::nullopt;
  if (name == "constant_point_influx") {
    const double rate = cfg.at("rate").get<double>();
    if (rate < 0.0) throw std::invalid_argument("constant_point_influx: rate must be >= 0");
    Point site;
    if (net->space().kind() == Space::Kind::Euclidean) {
      site = parse_vector(cfg.at("site"));
    } else if (net->space().kind() == Space::Kind::Finite) {
      site = FiniteIndex{cfg.at("site").get<int>()};
    } else {
      const auto& s = cfg.at("site");
      site = GraphPosition{s.at(0).get<int>(), s.at(1).get<double>()};
    }
    net->space().require_valid(site);
    // Mass enters at the single center the site snaps to; the influx is
    // already in finite-range form.
    const auto [l, d] = net->nearest_center(site);
    if (d > net->radius())
      throw std::invalid_argument("constant_point_influx: site lies outside the net");
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(net->size());
    coeffs[l] = rate;
    FiniteRangeInflux influx;
    influx.mass_bound = rate;
    influx.coefficients = [coeffs](double, const DiscreteMeasure&) { return coeffs; };
    return influx;
  }
  throw std::invalid_argument("unknown influx model: " + name);
}

TransportMap make_transport(const json& cfg) {
  const std::string name = name_of(cfg);
  TransportMap transport;
  if (name == "identity_transport") {
    transport.rule = IdentityTransport{};
    return transport;
  }
  if (name == "constant_velocity_transport") {
    const Eigen::VectorXd velocity = parse_vector(cfg.at("velocity"));
    ExplicitTransport rule;
    rule.map = [velocity](double t1, double t0, const Point& x, const DiscreteMeasure&) -> Point {
      return Eigen::VectorXd(std::get<Eigen::VectorXd>(x) + (t1 - t0) * velocity);
    };
    transport.rule = std::move(rule);
    transport.time_slope = velocity.norm();
    return transport;
  }
  if (name == "ode_flow") {
    const std::string field = cfg.value("field", "scale");
    const double coeff = cfg.at("coeff").get<double>();
    OdeFlowTransport rule;
    rule.substeps = cfg.value("substeps", 16);
    if (field == "scale") {
      rule.field = [coeff](double, const Eigen::VectorXd& x, const DiscreteMeasure&) {
        return Eigen::VectorXd(coeff * x);
      };
      transport.lip_rate = std::abs(coeff);
    } else if (field == "constant") {
      rule.field = [coeff](double, const Eigen::VectorXd& x, const DiscreteMeasure&) {
        return Eigen::VectorXd(Eigen::VectorXd::Constant(x.size(), coeff));
      };
      transport.time_slope = std::abs(coeff);
    } else {
      throw std::invalid_argument("unknown ode_flow field: " + field);
    }
    transport.rule = std::move(rule);
    return transport;
  }
  throw std::invalid_argument("unknown transport model: " + name);
}

ModelSpec make_model(const json& model_cfg, std::shared_ptr<const EpsilonNet> net) {
  ModelSpec model;
  model.net = std::move(net);
  model.growth = make_growth(model_cfg.value("growth", json{{"name", "none"}}));
  model.kernel = make_kernel(model_cfg.value("kernel", json{{"name", "none"}}), model.net);
  model.influx = make_influx(model_cfg.value("influx", json{{"name", "none"}}), model.net);
  model.transport =
      make_transport(model_cfg.value("transport", json{{"name", "identity_transport"}}));
  model.lip_growth_measure = model_cfg.value("lip_growth_measure", 0.0);
  model.lip_kernel_measure = model_cfg.value("lip_kernel_measure", 0.0);
  model.lip_influx_measure = model_cfg.value("lip_influx_measure", 0.0);
  return model;
}

bool has_analytic_reference(const std::string& family) {
  return family == "pure_growth" || family == "pure_transport" ||
         family == "constant_influx" || family == "growth_plus_influx";
}

DiscreteMeasure analytic_reference(const std::string& family, const Space& space,
                                   const DiscreteMeasure& mu0, const json& model_cfg,
                                   double t) {
  if (family == "pure_growth") {
    const double rate = model_cfg.at("growth").at("rate").get<double>();
    return DiscreteMeasure(mu0.points, Eigen::VectorXd(std::exp(rate * t) * mu0.weights));
  }
  if (family == "pure_transport") {
    const Eigen::VectorXd velocity = parse_vector(model_cfg.at("transport").at("velocity"));
    return push_forward(mu0, [&](const Point& x) -> Point {
      return Eigen::VectorXd(std::get<Eigen::VectorXd>(x) + t * velocity);
    });
  }
  if (family == "constant_influx" || family == "growth_plus_influx") {
    const double rate = family == "constant_influx"
                            ? 0.0
                            : model_cfg.at("growth").at("rate").get<double>();
    const double influx_rate = model_cfg.at("influx").at("rate").get<double>();
    const Eigen::VectorXd site = parse_vector(model_cfg.at("influx").at("site"));
    const double scale = std::exp(rate * t);
    const double injected =
        rate == 0.0 ? influx_rate * t : influx_rate * (scale - 1.0) / rate;
    std::vector<Point> points = mu0.points;
    Eigen::VectorXd weights = scale * mu0.weights;
    int at_site = -1;
    for (int j = 0; j < mu0.size(); ++j)
      if (space.distance(points[j], Point(site)) <= 1e-12) at_site = j;
    if (at_site >= 0) {
      weights[at_site] += injected;
    } else if (injected > 0.0) {
      points.push_back(site);
      weights.conservativeResize(weights.size() + 1);
      weights[weights.size() - 1] = injected;
    }
    return DiscreteMeasure(std::move(points), std::move(weights));
  }
  throw std::invalid_argument("no analytic reference for family: " + family);
}

json family_model_config(const std::string& family, const json& params) {
  auto get = [&](const char* key, double fallback) { return params.value(key, fallback); };
  if (family == "pure_growth") {
    return json{{"growth", {{"name", "constant_growth"}, {"rate", get("rate", 1.0)}}},
                {"kernel", {{"name", "none"}}},
                {"influx", {{"name", "none"}}},
                {"transport", {{"name", "identity_transport"}}}};
  }
  if (family == "pure_transport") {
    return json{{"growth", {{"name", "none"}}},
                {"kernel", {{"name", "none"}}},
                {"influx", {{"name", "none"}}},
                {"transport",
                 {{"name", "constant_velocity_transport"},
                  {"velocity", params.value("velocity", json::array({1.0}))}}}};
  }
  if (family == "constant_influx" || family == "growth_plus_influx") {
    json growth = family == "constant_influx"
                      ? json{{"name", "none"}}
                      : json{{"name", "constant_growth"}, {"rate", get("rate", 1.0)}};
    return json{{"growth", growth},
                {"kernel", {{"name", "none"}}},
                {"influx",
                 {{"name", "constant_point_influx"},
                  {"rate", get("influx_rate", 5.0)},
                  {"site", params.value("site", json::array({0.5}))}}},
                {"transport", {{"name", "identity_transport"}}}};
  }
  throw std::invalid_argument("unknown model family: " + family);
}

}  // namespace popmeas
