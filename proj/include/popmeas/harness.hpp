#pragma once

#include "popmeas/config.hpp"
#include "popmeas/convergence.hpp"
#include "popmeas/model.hpp"

#include <optional>
#include <string>

namespace popmeas {

struct CliOptions {
  std::string out_path;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  bool force = false;
};

/// Runs one simulation and writes the trajectory CSV plus a JSON summary
/// (out path + ".summary.json"). Fails on a negative validation report
/// unless forced.
json run_simulate(const json& config, const CliOptions& opt);

/// Flat distance between two measure files over the configured space.
double run_flatnorm(const json& space_config, const json& mu_json, const json& nu_json);

/// Convergence study along "dt" or "epsilon" against an analytic reference
/// or an 8x-refined self reference; writes CSV rows and a JSON report.
json run_convergence(const json& config, const CliOptions& opt);

/// Commutator-defect scaling study for a frozen autonomous model.
json run_commutator(const json& config, const CliOptions& opt);

/// Grid posterior for a parameterized model family; writes the posterior
/// CSV and a JSON summary.
json run_bayes(const json& config, const CliOptions& opt);

ValidationReport run_validate(const json& config);

}  // namespace popmeas
