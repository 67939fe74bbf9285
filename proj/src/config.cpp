#include "popmeas/config.hpp"

#include <cmath>
#include <stdexcept>

#include "popmeas/model_library.hpp"

namespace popmeas {

namespace {

Eigen::VectorXd parse_vector(const json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("expected a nonempty numeric array");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

Space parse_space(const json& cfg) {
  if (!cfg.is_object() || !cfg.contains("type"))
    throw std::invalid_argument("space config needs a \"type\" field");
  const std::string type = cfg.at("type").get<std::string>();
  if (type == "euclidean_box") {
    Eigen::VectorXd lower = parse_vector(cfg.at("lower"));
    Eigen::VectorXd upper = parse_vector(cfg.at("upper"));
    if (cfg.contains("dims") && cfg.at("dims").get<int>() != lower.size())
      throw std::invalid_argument("space config: dims does not match the bounds");
    return Space::euclidean_box(std::move(lower), std::move(upper));
  }
  if (type == "graph") {
    std::vector<GraphEdge> edges;
    for (const auto& e : cfg.at("edges"))
      edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    int vertices = 0;
    if (cfg.contains("vertices")) {
      vertices = cfg.at("vertices").get<int>();
    } else {
      for (const auto& e : edges) vertices = std::max({vertices, e.from + 1, e.to + 1});
    }
    return Space::graph(vertices, std::move(edges));
  }
  if (type == "finite") {
    const auto& rows = cfg.at("matrix");
    const int n = static_cast<int>(rows.size());
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[i].size()) != n)
        throw std::invalid_argument("finite space: matrix must be square");
      for (int j = 0; j < n; ++j) m(i, j) = rows[i][j].get<double>();
    }
    return Space::finite(std::move(m));
  }
  throw std::invalid_argument("unknown space type: " + type);
}

json space_to_json(const Space& space) {
  switch (space.kind()) {
    case Space::Kind::Euclidean:
      return json{{"type", "euclidean_box"},
                  {"dims", space.dimension()},
                  {"lower", vector_to_json(space.lower())},
                  {"upper", vector_to_json(space.upper())}};
    case Space::Kind::Graph: {
      json edges = json::array();
      for (const auto& e : space.edges()) edges.push_back(json::array({e.from, e.to, e.length}));
      return json{{"type", "graph"}, {"vertices", space.vertex_count()}, {"edges", edges}};
    }
    case Space::Kind::Finite: {
      json rows = json::array();
      for (int i = 0; i < space.cardinality(); ++i) {
        json row = json::array();
        for (int j = 0; j < space.cardinality(); ++j) row.push_back(space.distance_matrix()(i, j));
        rows.push_back(row);
      }
      return json{{"type", "finite"}, {"matrix", rows}};
    }
  }
  return {};
}

json point_to_json(const Space& space, const Point& p) {
  switch (space.kind()) {
    case Space::Kind::Euclidean:
      return vector_to_json(std::get<Eigen::VectorXd>(p));
    case Space::Kind::Graph: {
      const auto& g = std::get<GraphPosition>(p);
      return json{{"edge", g.edge}, {"offset", g.offset}};
    }
    case Space::Kind::Finite:
      return std::get<FiniteIndex>(p).value;
  }
  return {};
}

Point parse_point(const Space& space, const json& j) {
  Point p;
  switch (space.kind()) {
    case Space::Kind::Euclidean:
      p = parse_vector(j);
      break;
    case Space::Kind::Graph:
      if (j.is_object())
        p = GraphPosition{j.at("edge").get<int>(), j.at("offset").get<double>()};
      else
        p = GraphPosition{j.at(0).get<int>(), j.at(1).get<double>()};
      break;
    case Space::Kind::Finite:
      p = FiniteIndex{j.get<int>()};
      break;
  }
  space.require_valid(p);
  return p;
}

DiscreteMeasure parse_measure(const Space& space, const json& j) {
  if (!j.contains("points") || !j.contains("weights"))
    throw std::invalid_argument("measure needs \"points\" and \"weights\" fields");
  std::vector<Point> points;
  for (const auto& pj : j.at("points")) points.push_back(parse_point(space, pj));
  Eigen::VectorXd weights = j.at("weights").empty() ? Eigen::VectorXd(0)
                                                    : parse_vector(j.at("weights"));
  if (j.at("points").empty()) weights.resize(0);
  return DiscreteMeasure(std::move(points), std::move(weights));
}

json measure_to_json(const Space& space, const DiscreteMeasure& mu) {
  json points = json::array();
  json weights = json::array();
  for (int j = 0; j < mu.size(); ++j) {
    points.push_back(point_to_json(space, mu.points[j]));
    weights.push_back(mu.weights[j]);
  }
  return json{{"points", points}, {"weights", weights}};
}

SolverConfig parse_solver(const json& cfg) {
  SolverConfig solver;
  solver.dt = cfg.at("dt").get<double>();
  solver.t_end = cfg.at("t_end").get<double>();
  solver.merge_tol = cfg.value("merge_tol", 1e-9);
  solver.weight_tol = cfg.value("weight_tol", 0.0);
  solver.ode_substeps = cfg.value("ode_substeps", 16);
  return solver;
}

json resolve_config(const json& raw) {
  if (!raw.is_object()) throw std::invalid_argument("config must be a JSON object");
  if (!raw.contains("schema")) throw std::invalid_argument("config is missing \"schema\"");
  if (raw.at("schema").get<int>() != 1)
    throw std::invalid_argument("unsupported config schema version");
  json cfg = raw;
  if (!cfg.contains("seed")) cfg["seed"] = 0;
  return cfg;
}

RunSetup build_run(const json& config) {
  json cfg = resolve_config(config);
  const Space space = parse_space(cfg.at("space"));

  if (!cfg.contains("net")) throw std::invalid_argument("config is missing \"net\"");
  json& net_cfg = cfg.at("net");
  const double epsilon = net_cfg.at("epsilon").get<double>();
  const double cutoff = net_cfg.value("cutoff", 0.5);
  CompactSet cover = CompactSet::whole_space();
  if (space.kind() == Space::Kind::Euclidean) {
    cover = net_cfg.contains("k_lower")
                ? CompactSet::box(parse_vector(net_cfg.at("k_lower")),
                                  parse_vector(net_cfg.at("k_upper")))
                : CompactSet::box(space.lower(), space.upper());
  }
  RunSetup setup;
  setup.net = std::make_shared<EpsilonNet>(build_epsilon_net(space, cover, epsilon, cutoff));
  setup.model = make_model(cfg.value("model", json::object()), setup.net);
  setup.solver = parse_solver(cfg.at("solver"));
  setup.seed = cfg.at("seed").get<std::uint64_t>();

  if (cfg.contains("family")) {
    cfg["model"] = family_model_config(cfg.at("family").get<std::string>(),
                                       cfg.value("family_params", json::object()));
    setup.model = make_model(cfg.at("model"), setup.net);
  }

  if (!cfg.contains("initial")) throw std::invalid_argument("config is missing \"initial\"");
  const json& init = cfg.at("initial");
  const std::string type = init.value("type", "discrete");
  SourceMeasure source;
  bool project = init.value("project", type != "discrete");
  if (type == "discrete") {
    source = parse_measure(setup.net->space(), init);
  } else if (type == "density") {
    const std::string name = init.value("name", "uniform");
    const double value = init.value("value", 1.0);
    DensitySource density;
    density.resolution = init.value("resolution", 512);
    if (name == "uniform") {
      density.density = [value](const Point&) { return value; };
    } else if (name == "bump") {
      // Smooth nonnegative bump centered in the box.
      const Eigen::VectorXd center = parse_vector(init.at("center"));
      const double width = init.value("width", 0.25);
      density.density = [value, center, width](const Point& p) {
        const double d2 = (std::get<Eigen::VectorXd>(p) - center).squaredNorm();
        return value * std::exp(-d2 / (2.0 * width * width));
      };
    } else {
      throw std::invalid_argument("unknown density name: " + name);
    }
    source = std::move(density);
  } else if (type == "sample_cloud") {
    SampleCloudSource cloud;
    for (const auto& pj : init.at("points"))
      cloud.points.push_back(parse_point(setup.net->space(), pj));
    cloud.point_weight = init.value("point_weight", 1.0);
    source = std::move(cloud);
  } else {
    throw std::invalid_argument("unknown initial measure type: " + type);
  }
  setup.initial = project ? approximate_initial(setup.net->space(), *setup.net, source)
                          : std::get<DiscreteMeasure>(source);
  setup.resolved = cfg;
  return setup;
}

ObservationScheme parse_scheme(const Space& space, const json& cfg) {
  ObservationScheme scheme;
  for (const auto& t : cfg.at("times")) scheme.times.push_back(t.get<double>());
  for (const auto& oj : cfg.at("observables")) {
    Observable obs;
    obs.name = oj.at("name").get<std::string>();
    obs.bl_norm = oj.value("bl_norm", 1.0);
    if (obs.bl_norm <= 0.0)
      throw std::invalid_argument("observable bl_norm must be positive");
    if (obs.name == "total_mass") {
      obs.fn = [](const Point&) { return 1.0; };
    } else if (obs.name == "distance_to") {
      const Point origin = parse_point(space, oj.at("origin"));
      obs.fn = [space, origin](const Point& x) { return space.distance(origin, x); };
    } else if (obs.name == "coordinate") {
      const int axis = oj.value("axis", 0);
      if (space.kind() != Space::Kind::Euclidean)
        throw std::invalid_argument("coordinate observable requires a Euclidean space");
      obs.fn = [axis](const Point& x) { return std::get<Eigen::VectorXd>(x)[axis]; };
    } else {
      throw std::invalid_argument("unknown observable: " + obs.name);
    }
    scheme.observables.push_back(std::move(obs));
  }
  if (scheme.observables.empty() || scheme.times.empty())
    throw std::invalid_argument("observation scheme needs times and observables");
  const json& noise = cfg.at("noise");
  const std::string type = noise.at("type").get<std::string>();
  if (type == "gaussian") {
    const double sigma = noise.at("sigma").get<double>();
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian noise: sigma must be positive");
    scheme.noise = GaussianNoise{sigma};
  } else {
    throw std::invalid_argument("unknown noise type: " + type);
  }
  return scheme;
}

}  // namespace popmeas
