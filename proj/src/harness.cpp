#include "popmeas/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "popmeas/bayes.hpp"
#include "popmeas/flat_metric.hpp"
#include "popmeas/io.hpp"
#include "popmeas/model_library.hpp"
#include "popmeas/solver.hpp"

namespace popmeas {

namespace {

json apply_cli_overrides(json config, const CliOptions& opt) {
  if (opt.seed) config["seed"] = *opt.seed;
  return config;
}

std::string summary_path(const std::string& out) { return out + ".summary.json"; }

std::string validation_text(const ValidationReport& report) {
  std::ostringstream out;
  for (const auto& c : report.checks)
    out << (c.passed ? "pass" : "FAIL") << "  " << c.name << "  (" << c.detail << ")\n";
  return out.str();
}

void require_validated(const RunSetup& setup, bool force) {
  const ValidationReport report = validate_model(setup.model, setup.solver.dt);
  if (!report.all_passed() && !force)
    throw std::invalid_argument("model validation failed (use --force to run anyway):\n" +
                                validation_text(report));
}

// Runs jobs 0..count-1 on up to `workers` threads; each job writes only its
// own slot, so results are identical for any worker count.
void parallel_for(int count, int workers, const std::function<void(int)>& job) {
  const int threads = std::max(1, std::min(workers, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) job(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

json run_simulate(const json& raw, const CliOptions& opt) {
  const RunSetup setup = build_run(apply_cli_overrides(raw, opt));
  std::optional<ObservationScheme> scheme;
  if (setup.resolved.contains("observations")) {
    scheme = parse_scheme(setup.space(), setup.resolved.at("observations"));
    validate_observation_times(*scheme, setup.solver.dt, setup.solver.t_end);
  }
  require_validated(setup, opt.force);

  const Trajectory traj = simulate(setup.model, setup.initial, setup.solver);

  const std::string out = !opt.out_path.empty()
                              ? opt.out_path
                              : setup.resolved.value("output", json::object())
                                    .value("trajectory", std::string("trajectory.csv"));
  write_text_file(out, trajectory_csv(setup.space(), traj));

  json summary{{"schema", 1},
               {"config", setup.resolved},
               {"trajectory", trajectory_summary(setup.space(), traj)}};
  if (scheme) {
    const Eigen::MatrixXd y = observe(traj, *scheme);
    json rows = json::array();
    for (int i = 0; i < y.rows(); ++i) {
      json row = json::array();
      for (int m = 0; m < y.cols(); ++m) row.push_back(y(i, m));
      rows.push_back(row);
    }
    summary["observations"] = rows;
  }
  write_text_file(summary_path(out), summary.dump(2) + "\n");
  return summary;
}

double run_flatnorm(const json& space_config, const json& mu_json, const json& nu_json) {
  const json cfg = resolve_config(space_config);
  const Space space = parse_space(cfg.at("space"));
  const DiscreteMeasure mu = parse_measure(space, mu_json);
  const DiscreteMeasure nu = parse_measure(space, nu_json);
  return flat_distance(space, mu, nu);
}

json run_convergence(const json& raw, const CliOptions& opt) {
  const json cfg = resolve_config(apply_cli_overrides(raw, opt));
  const std::string axis = cfg.at("study").get<std::string>();
  if (axis != "dt" && axis != "epsilon")
    throw std::invalid_argument("study must be \"dt\" or \"epsilon\"");
  std::vector<double> values;
  for (const auto& v : cfg.at("values")) values.push_back(v.get<double>());
  if (values.size() < 3) throw std::invalid_argument("study needs at least 3 parameter values");
  std::sort(values.begin(), values.end(), std::greater<>());
  const json base = cfg.at("run");
  std::string reference = cfg.value("reference", "analytic");
  std::string family;
  if (reference == "analytic") {
    if (!base.contains("family"))
      throw std::invalid_argument("analytic reference requires run.family");
    family = base.at("family").get<std::string>();
    if (!has_analytic_reference(family))
      throw std::invalid_argument("no analytic reference for family " + family);
  } else if (reference != "self") {
    throw std::invalid_argument("reference must be \"analytic\" or \"self\"");
  }

  auto configured = [&](double value) {
    json run_cfg = base;
    if (axis == "dt")
      run_cfg["solver"]["dt"] = value;
    else
      run_cfg["net"]["epsilon"] = value;
    return run_cfg;
  };

  std::vector<ConvergenceRow> rows(values.size());
  parallel_for(static_cast<int>(values.size()), opt.workers, [&](int i) {
    const RunSetup setup = build_run(configured(values[i]));
    const Trajectory traj = simulate(setup.model, setup.initial, setup.solver);
    DiscreteMeasure ref;
    if (reference == "analytic") {
      ref = analytic_reference(family, setup.space(), setup.initial,
                               setup.resolved.at("model"), setup.solver.t_end);
    } else {
      const RunSetup fine = build_run(configured(values[i] / 8.0));
      ref = simulate(fine.model, fine.initial, fine.solver).final_state();
    }
    rows[i] = {values[i],
               flat_distance(setup.space(), traj.final_state(), ref)};
  });

  const ConvergenceReport report = make_convergence_report(axis, reference, rows);
  json rows_json = json::array();
  std::string csv = "parameter,error\n";
  for (const auto& row : report.rows) {
    rows_json.push_back(json{{"parameter", row.parameter}, {"error", row.error}});
    csv += format_double(row.parameter) + "," + format_double(row.error) + "\n";
  }
  json out{{"schema", 1},
           {"study", report.axis},
           {"reference", report.reference},
           {"rows", rows_json},
           {"fitted_order", report.fitted_order},
           {"fitted_constant", report.fitted_constant},
           {"linear_constant", report.linear_constant},
           {"monotone", report.monotone},
           {"fit_valid", report.fit_valid},
           {"config", cfg}};
  if (!opt.out_path.empty()) {
    write_text_file(opt.out_path, csv);
    write_text_file(summary_path(opt.out_path), out.dump(2) + "\n");
  }
  return out;
}

namespace {

FrozenModel parse_frozen(const json& cfg, std::shared_ptr<const EpsilonNet> net) {
  FrozenModel model;
  model.net = std::move(net);
  const Space& space = model.net->space();
  if (cfg.contains("velocity")) {
    Eigen::VectorXd velocity(cfg.at("velocity").size());
    for (size_t i = 0; i < cfg.at("velocity").size(); ++i)
      velocity[i] = cfg.at("velocity")[i].get<double>();
    if (space.kind() != Space::Kind::Euclidean)
      throw std::invalid_argument("frozen shift transport requires a Euclidean space");
    model.transport = [velocity](double t, const Point& x) -> Point {
      return Eigen::VectorXd(std::get<Eigen::VectorXd>(x) + t * velocity);
    };
  }
  if (cfg.contains("growth_rate")) {
    const double rate = cfg.at("growth_rate").get<double>();
    model.growth = [rate](const Point&) { return rate; };
  }
  if (cfg.contains("influx")) {
    json influx_cfg = cfg.at("influx");
    influx_cfg["name"] = "constant_point_influx";
    const auto influx = make_influx(influx_cfg, model.net);
    model.influx = influx->coefficients(0.0, DiscreteMeasure{});
  }
  if (cfg.contains("kernel")) {
    const auto kernel = make_kernel(cfg.at("kernel"), model.net);
    if (kernel) {
      model.kernel = [fn = kernel->coefficients](const Point& x) {
        return fn(0.0, x, DiscreteMeasure{});
      };
    }
  }
  return model;
}

}  // namespace

json run_commutator(const json& raw, const CliOptions& opt) {
  const json cfg = resolve_config(apply_cli_overrides(raw, opt));
  const Space space = parse_space(cfg.at("space"));
  CompactSet cover = space.kind() == Space::Kind::Euclidean
                         ? CompactSet::box(space.lower(), space.upper())
                         : CompactSet::whole_space();
  auto net = std::make_shared<EpsilonNet>(
      build_epsilon_net(space, cover, cfg.at("net").at("epsilon").get<double>()));
  const FrozenModel model = parse_frozen(cfg.at("frozen"), net);
  const DiscreteMeasure mu0 = parse_measure(net->space(), cfg.at("initial"));

  std::vector<double> ts;
  for (const auto& t : cfg.at("t_values")) ts.push_back(t.get<double>());
  std::sort(ts.begin(), ts.end(), std::greater<>());
  std::vector<double> defects(ts.size());
  parallel_for(static_cast<int>(ts.size()), opt.workers,
               [&](int i) { defects[i] = commutator_defect(model, mu0, ts[i]); });

  const bool defined =
      std::all_of(defects.begin(), defects.end(), [](double d) { return d > 1e-15; });
  const OrderFit fit = defined ? fit_loglog(ts, defects) : OrderFit{};
  json rows = json::array();
  for (size_t i = 0; i < ts.size(); ++i)
    rows.push_back(json{{"t", ts[i]}, {"defect", defects[i]}});
  json out{{"schema", 1},
           {"rows", rows},
           {"slope_defined", defined && fit.valid},
           {"slope", fit.valid ? fit.slope : 0.0},
           {"config", cfg}};
  if (!opt.out_path.empty()) write_text_file(opt.out_path, out.dump(2) + "\n");
  return out;
}

json run_bayes(const json& raw, const CliOptions& opt) {
  const json cfg = resolve_config(apply_cli_overrides(raw, opt));
  const json base = cfg.at("run");

  std::vector<json::json_pointer> bindings;
  for (const auto& p : cfg.at("parameters"))
    bindings.emplace_back(p.get<std::string>());

  Eigen::VectorXd lower(cfg.at("box").at("lower").size());
  Eigen::VectorXd upper(lower.size());
  std::vector<int> resolution;
  for (int i = 0; i < lower.size(); ++i) {
    lower[i] = cfg.at("box").at("lower")[i].get<double>();
    upper[i] = cfg.at("box").at("upper")[i].get<double>();
    resolution.push_back(cfg.at("box").at("resolution")[i].get<int>());
  }
  const ParamBox box(lower, upper, resolution);
  if (box.dim() != static_cast<int>(bindings.size()))
    throw std::invalid_argument("box dimension must match the number of bound parameters");

  // One forward solve per distinct theta; the grid posterior then costs
  // exactly one solve per node.
  auto cache = std::make_shared<std::map<std::vector<double>, Trajectory>>();
  auto cache_mutex = std::make_shared<std::mutex>();
  ForwardModel forward = [base, bindings, cache, cache_mutex](const Eigen::VectorXd& theta) {
    std::vector<double> key(theta.data(), theta.data() + theta.size());
    {
      std::lock_guard<std::mutex> lock(*cache_mutex);
      const auto hit = cache->find(key);
      if (hit != cache->end()) return hit->second;
    }
    json run_cfg = base;
    for (size_t i = 0; i < bindings.size(); ++i) run_cfg[bindings[i]] = theta[i];
    const RunSetup setup = build_run(run_cfg);
    Trajectory traj = simulate(setup.model, setup.initial, setup.solver);
    std::lock_guard<std::mutex> lock(*cache_mutex);
    return cache->emplace(std::move(key), std::move(traj)).first->second;
  };

  const RunSetup probe = build_run(base);
  ObservationScheme scheme = parse_scheme(probe.space(), cfg.at("scheme"));
  validate_observation_times(scheme, probe.solver.dt, probe.solver.t_end);

  DataSet data;
  const json& data_cfg = cfg.at("data");
  const std::string data_type = data_cfg.at("type").get<std::string>();
  if (data_type == "synthesize") {
    Eigen::VectorXd theta_true(box.dim());
    for (int i = 0; i < box.dim(); ++i)
      theta_true[i] = data_cfg.at("theta_true")[i].get<double>();
    const std::uint64_t seed =
        data_cfg.value("seed", cfg.value("seed", std::uint64_t{0}));
    data = synthesize_data(forward, theta_true, scheme, seed);
  } else if (data_type == "inline" || data_type == "file") {
    const json values = data_type == "inline"
                            ? data_cfg.at("values")
                            : read_json_file(data_cfg.at("path").get<std::string>()).at("values");
    data.values.resize(scheme.rows(), scheme.cols());
    for (int i = 0; i < data.values.rows(); ++i)
      for (int m = 0; m < data.values.cols(); ++m)
        data.values(i, m) = values.at(i).at(m).get<double>();
  } else {
    throw std::invalid_argument("unknown data type: " + data_type);
  }

  const std::string prior_type = cfg.value("prior", json{{"type", "uniform"}})
                                     .value("type", std::string("uniform"));
  if (prior_type != "uniform")
    throw std::invalid_argument("unknown prior type: " + prior_type);
  double volume = 1.0;
  for (int i = 0; i < box.dim(); ++i) volume *= upper[i] - lower[i];
  auto prior = [volume](const Eigen::VectorXd&) { return 1.0 / volume; };

  const PosteriorGrid post = posterior_grid(data, prior, box, forward, scheme, opt.workers);

  std::string csv;
  for (int i = 0; i < box.dim(); ++i) csv += "theta" + std::to_string(i) + ",";
  csv += "density\n";
  for (int g = 0; g < box.node_count(); ++g) {
    const Eigen::VectorXd node = box.node(g);
    for (int i = 0; i < box.dim(); ++i) csv += format_double(node[i]) + ",";
    csv += format_double(post.density[g]) + "\n";
  }

  json mode = json::array(), mean = json::array();
  const Eigen::VectorXd mode_node = box.node(post.mode_index());
  const Eigen::VectorXd mean_vec = post.mean();
  for (int i = 0; i < box.dim(); ++i) {
    mode.push_back(mode_node[i]);
    mean.push_back(mean_vec[i]);
  }
  json data_rows = json::array();
  for (int i = 0; i < data.values.rows(); ++i) {
    json row = json::array();
    for (int m = 0; m < data.values.cols(); ++m) row.push_back(data.values(i, m));
    data_rows.push_back(row);
  }
  json out{{"schema", 1},
           {"mode", mode},
           {"mean", mean},
           {"evidence", post.evidence},
           {"normalization_residual", post.normalization_residual},
           {"data", data_rows},
           {"config", cfg}};
  if (!opt.out_path.empty()) {
    write_text_file(opt.out_path, csv);
    write_text_file(summary_path(opt.out_path), out.dump(2) + "\n");
  }
  return out;
}

ValidationReport run_validate(const json& raw) {
  const RunSetup setup = build_run(raw);
  return validate_model(setup.model, setup.solver.dt);
}

}  // namespace popmeas
