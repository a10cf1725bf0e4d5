#pragma once

#include "rendezvous/sim.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace rendezvous {

struct OutputPaths {
  std::filesystem::path csv;
  std::filesystem::path svg;
  std::filesystem::path report;
  std::filesystem::path sweep_csv;
};

struct ScenarioFile {
  Scenario scenario;
  OutputPaths outputs;
};

/// Parses angles given as numbers (radians) or exact strings such as
/// "8*pi/5", "-pi/2", "pi", "2pi". Throws Error{Schema} naming `field`.
double parse_angle(const nlohmann::json& value, const std::string& field);

/// Validates the whole document before building anything. Relative output
/// paths are resolved against `base_dir`. Schema problems throw
/// Error{Schema}; graph problems throw the graph error codes.
ScenarioFile parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir);

ScenarioFile load_scenario(const std::filesystem::path& path,
                           const std::filesystem::path& base_dir);

/// `t,agent,x,y,theta,u,omega,diameter`, one row per agent per sample.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const DiGraph& g);

/// Self-contained SVG: one polyline per agent, start/end markers, and a
/// legend listing the sensor graph edges.
void write_trajectory_svg(std::ostream& os, const Trajectory& traj, const DiGraph& g);

void write_sweep_csv(std::ostream& os, const SweepTable& table);

/// %.17g formatting.
std::string format_double(double v);

}  // namespace rendezvous
