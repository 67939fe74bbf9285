#pragma once

#include "popmeas/bayes.hpp"
#include "popmeas/measure.hpp"
#include "popmeas/model.hpp"
#include "popmeas/solver.hpp"
#include "popmeas/space.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

namespace popmeas {

using json = nlohmann::json;

/// Parses {"type": "euclidean_box" | "graph" | "finite", ...}.
Space parse_space(const json& cfg);
json space_to_json(const Space& space);

json point_to_json(const Space& space, const Point& p);
Point parse_point(const Space& space, const json& j);

/// Measure files: {"points": [...], "weights": [...]}.
DiscreteMeasure parse_measure(const Space& space, const json& j);
json measure_to_json(const Space& space, const DiscreteMeasure& mu);

SolverConfig parse_solver(const json& cfg);

/// Checks the schema marker and returns the config with defaults resolved.
json resolve_config(const json& raw);

/// A fully built simulation setup.
struct RunSetup {
  json resolved;  ///< config with defaults filled, embedded into reports
  std::shared_ptr<const EpsilonNet> net;
  ModelSpec model;
  DiscreteMeasure initial;  ///< after optional projection onto the net
  SolverConfig solver;
  std::uint64_t seed = 0;

  const Space& space() const { return net->space(); }
};

RunSetup build_run(const json& config);

/// Observation scheme from config (times, named observables, noise).
ObservationScheme parse_scheme(const Space& space, const json& cfg);

}  // namespace popmeas
