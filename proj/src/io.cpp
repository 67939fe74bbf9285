#include "popmeas/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace popmeas {

std::string format_double(double x) {
  char buf[40];
  const auto result = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, result.ptr);
}

namespace {

void append_point_columns(const Space& space, const Point& p, std::string& row) {
  switch (space.kind()) {
    case Space::Kind::Euclidean: {
      const auto& v = std::get<Eigen::VectorXd>(p);
      for (int i = 0; i < v.size(); ++i) {
        row += format_double(v[i]);
        row += ',';
      }
      break;
    }
    case Space::Kind::Graph: {
      const auto& g = std::get<GraphPosition>(p);
      row += std::to_string(g.edge);
      row += ',';
      row += format_double(g.offset);
      row += ',';
      break;
    }
    case Space::Kind::Finite:
      row += std::to_string(std::get<FiniteIndex>(p).value);
      row += ',';
      break;
  }
}

std::string point_header(const Space& space) {
  switch (space.kind()) {
    case Space::Kind::Euclidean: {
      std::string h;
      for (int i = 0; i < space.dimension(); ++i) h += "x" + std::to_string(i) + ",";
      return h;
    }
    case Space::Kind::Graph:
      return "edge,offset,";
    case Space::Kind::Finite:
      return "index,";
  }
  return {};
}

}  // namespace

std::string trajectory_csv(const Space& space, const Trajectory& traj) {
  std::string out = "step,time," + point_header(space) + "weight\n";
  for (int k = 0; k < static_cast<int>(traj.times.size()); ++k) {
    const auto& state = traj.states[k];
    for (int j = 0; j < state.size(); ++j) {
      out += std::to_string(k);
      out += ',';
      out += format_double(traj.times[k]);
      out += ',';
      append_point_columns(space, state.points[j], out);
      out += format_double(state.weights[j]);
      out += '\n';
    }
  }
  return out;
}

json trajectory_summary(const Space& space, const Trajectory& traj) {
  (void)space;
  json times = json::array(), masses = json::array(), supports = json::array();
  for (int k = 0; k < static_cast<int>(traj.times.size()); ++k) {
    times.push_back(traj.times[k]);
    masses.push_back(total_mass(traj.states[k]));
    supports.push_back(traj.states[k].size());
  }
  return json{{"times", times}, {"masses", masses}, {"support_sizes", supports}};
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json read_json_file(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
  }
}

}  // namespace popmeas
