#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <nlohmann/json.hpp>

#include "popmeas/harness.hpp"
#include "popmeas/io.hpp"

namespace {

// Exit codes: 0 success, 1 runtime failure, 2 config/validation failure.
constexpr int kRuntimeFailure = 1;
constexpr int kConfigFailure = 2;

struct Args {
  std::string config_path;
  popmeas::CliOptions options;
  std::string subcommand;
  std::string mu_path, nu_path;
};

popmeas::json load_config(const std::string& path) {
  if (path.empty()) throw std::invalid_argument("--config is required");
  return popmeas::read_json_file(path);
}

int dispatch(const Args& args) {
  using popmeas::json;
  if (args.subcommand == "simulate") {
    popmeas::run_simulate(load_config(args.config_path), args.options);
    return 0;
  }
  if (args.subcommand == "flatnorm") {
    const double value = popmeas::run_flatnorm(load_config(args.config_path),
                                               popmeas::read_json_file(args.mu_path),
                                               popmeas::read_json_file(args.nu_path));
    std::printf("%.12g\n", value);
    return 0;
  }
  if (args.subcommand == "converge") {
    const json report = popmeas::run_convergence(load_config(args.config_path), args.options);
    std::printf("fitted order (%s): %.6g  constant: %.6g  reference: %s%s\n",
                report.at("study").get<std::string>().c_str(),
                report.at("fitted_order").get<double>(),
                report.at("fitted_constant").get<double>(),
                report.at("reference").get<std::string>().c_str(),
                report.at("monotone").get<bool>() ? "" : "  [non-monotone errors]");
    return 0;
  }
  if (args.subcommand == "commutator") {
    const json report = popmeas::run_commutator(load_config(args.config_path), args.options);
    for (const auto& row : report.at("rows"))
      std::printf("t = %-10.6g defect = %.10g\n", row.at("t").get<double>(),
                  row.at("defect").get<double>());
    if (report.at("slope_defined").get<bool>())
      std::printf("log-log slope: %.6g\n", report.at("slope").get<double>());
    else
      std::printf("log-log slope: undefined (vanishing defects)\n");
    return 0;
  }
  if (args.subcommand == "bayes") {
    const json report = popmeas::run_bayes(load_config(args.config_path), args.options);
    std::printf("posterior mode: %s  mean: %s  normalization residual: %.3g\n",
                report.at("mode").dump().c_str(), report.at("mean").dump().c_str(),
                report.at("normalization_residual").get<double>());
    return 0;
  }
  if (args.subcommand == "validate") {
    const auto report = popmeas::run_validate(load_config(args.config_path));
    for (const auto& c : report.checks)
      std::printf("%s  %-22s %s\n", c.passed ? "pass" : "FAIL", c.name.c_str(),
                  c.detail.c_str());
    return report.all_passed() ? 0 : kConfigFailure;
  }
  std::fprintf(stderr, "unknown subcommand\n");
  return kConfigFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Particle solver for measure-valued population models"};
  app.require_subcommand(1);

  Args args;
  app.add_option("--config", args.config_path, "JSON config file")->expected(1);
  app.add_option("--out", args.options.out_path, "output file path");
  app.add_option("--seed", args.options.seed, "override the config seed");
  app.add_option("--workers", args.options.workers, "worker thread count")
      ->check(CLI::PositiveNumber);
  app.add_flag("--force", args.options.force, "run despite validation failures");

  for (const char* name : {"simulate", "converge", "commutator", "bayes", "validate"})
    app.add_subcommand(name)->fallthrough();
  auto* flatnorm = app.add_subcommand("flatnorm")->fallthrough();
  flatnorm->add_option("mu", args.mu_path, "first measure JSON file")->required();
  flatnorm->add_option("nu", args.nu_path, "second measure JSON file")->required();

  CLI11_PARSE(app, argc, argv);
  args.subcommand = app.get_subcommands().front()->get_name();

  try {
    return dispatch(args);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigFailure;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return kRuntimeFailure;
  }
}
