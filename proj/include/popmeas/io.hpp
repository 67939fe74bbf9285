#pragma once

#include "popmeas/config.hpp"
#include "popmeas/solver.hpp"

#include <string>

namespace popmeas {

/// Shortest round-trip decimal rendering; identical inputs always produce
/// identical text, so repeated runs emit byte-identical files.
std::string format_double(double x);

/// One row per support point per recorded step:
/// step,time,<point columns>,weight
std::string trajectory_csv(const Space& space, const Trajectory& traj);

/// Times, masses and support sizes of a run.
json trajectory_summary(const Space& space, const Trajectory& traj);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
json read_json_file(const std::string& path);

}  // namespace popmeas
