#pragma once

// 2.5D analytic world: extruded box and cylinder obstacles on a flat floor at
// z = 0, a ray-cast depth camera, unicycle robot motion and disc collisions.

#include <cstdint>
#include <vector>

#include "groundnav/core.hpp"
#include "groundnav/depth_frame.hpp"

namespace groundnav::sim {

struct Box {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
  double height = 0.0;
  bool mapped = true;  // false: absent from prior maps, only perception can find it
};

struct Cylinder {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
  double height = 0.0;
  bool mapped = true;
};

struct Bounds {
  double x_min = -5.0;
  double x_max = 5.0;
  double y_min = -5.0;
  double y_max = 5.0;

  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

struct Scene {
  std::vector<Box> boxes;
  std::vector<Cylinder> cylinders;
  Bounds bounds;

  void validate() const;
  /// Object ids: boxes first, then cylinders.
  std::size_t object_count() const { return boxes.size() + cylinders.size(); }
  double object_height(int id) const;
};

enum class SurfaceLabel : std::uint8_t { None = 0, Ground = 1, Obstacle = 2 };

/// Per-pixel ground truth paired with a rendered DepthFrame.
struct LabelFrame {
  int width = 0;
  int height = 0;
  std::vector<SurfaceLabel> labels;
  std::vector<double> hit_height;  // world z of the hit point, 0 where None
  std::vector<int> object;         // object id for obstacle hits, -1 otherwise

  SurfaceLabel at(int u, int v) const { return labels[static_cast<std::size_t>(v) * width + u]; }
};

struct DepthNoise {
  double sigma = 0.0;    // zero-mean Gaussian, meters
  double dropout = 0.0;  // probability a valid sample is zeroed
  std::uint64_t seed = 0;
};

struct RenderOptions {
  int stride_u = 1;  // only pixels with u % stride_u == 0 and v % stride_v == 0 are cast
  int stride_v = 1;
  DepthNoise noise;
  double timestamp = 0.0;
};

struct Rendering {
  DepthFrame depth;
  LabelFrame labels;
};

/// Ray-casts the camera mounted on a robot at `robot_pose`. Depth is the
/// optical-axis distance of the nearest hit; hits outside the camera's depth
/// range, or no hit at all, give an invalid (0) sample labeled None.
Rendering render_depth(const Scene& scene, const Pose2D& robot_pose, const CameraModel& cam,
                       const RenderOptions& options = {});

struct SimState {
  Pose2D robot_pose;
  Twist robot_twist;
  double time = 0.0;
};

/// Clamps the command to velocity and acceleration limits and integrates the
/// applied twist for dt seconds.
SimState step_sim(const SimState& state, const Twist& cmd, double dt, const RobotParams& params);

/// Applies velocity and per-step acceleration limits to a command.
Twist limit_command(const Twist& current, const Twist& cmd, double dt, const RobotParams& params);

/// True when the robot disc overlaps an obstacle footprint (open test: tangency
/// is not a collision) or is not fully inside the scene bounds.
bool check_collision(const Scene& scene, const Pose2D& pose, const RobotParams& params);

/// Distance from (x, y) to the nearest obstacle footprint (0 inside one).
double obstacle_distance(const Scene& scene, double x, double y);

}  // namespace groundnav::sim
