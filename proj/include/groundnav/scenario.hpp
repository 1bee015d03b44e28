#pragma once

// Scenario files: line-oriented `key = value` text with `#` comments.
//
//   name = corridor
//   seed = 7
//   start = x y theta          (required)
//   goal = x y                 (required)
//   bounds = x_min x_max y_min y_max
//   box = x0 x1 y0 y1 h [unmapped]        (repeatable)
//   cylinder = cx cy r h [unmapped]       (repeatable)
//   camera.fx|fy|cx|cy|width|height|mount_height|pitch|min_depth|max_depth = value
//   robot.radius|clearance_height|v_max|omega_max|a_max|alpha_max = value
//   noise.sigma|dropout = value
//   map.resolution = value
//
// Obstacles marked `unmapped` are left out of prior maps; only the camera can
// reveal them. Every scalar key may appear at most once.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "groundnav/core.hpp"
#include "groundnav/simenv.hpp"

namespace groundnav {

struct Scenario {
  std::string name = "scenario";
  sim::Scene scene;
  Pose2D start;
  Point2 goal;
  CameraModel camera;
  RobotParams robot;
  std::uint64_t seed = 0;
  double map_resolution = 0.05;
  double noise_sigma = 0.0;
  double noise_dropout = 0.0;

  void validate() const;
};

/// Throws ParseError (with line number) or ValidationError.
Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::filesystem::path& path);
/// Serializes a scenario so that load_scenario(format_scenario(s)) reproduces it.
std::string format_scenario(const Scenario& s);

}  // namespace groundnav
