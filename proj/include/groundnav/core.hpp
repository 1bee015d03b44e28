#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <numbers>
#include <optional>

namespace groundnav {

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle into (-pi, pi].
double normalize_angle(double a);

struct Pose2D {
  double x = 0.0;      // m
  double y = 0.0;      // m
  double theta = 0.0;  // rad, (-pi, pi]

  friend bool operator==(const Pose2D&, const Pose2D&) = default;
};

struct Twist {
  double v = 0.0;      // m/s
  double omega = 0.0;  // rad/s

  friend bool operator==(const Twist&, const Twist&) = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Rigid-body composition a∘b: b expressed in a's frame, result in a's parent frame.
Pose2D se2_compose(const Pose2D& a, const Pose2D& b);
Pose2D se2_inverse(const Pose2D& p);
/// Maps a point from p's local frame into p's parent frame.
Point2 se2_apply(const Pose2D& p, Point2 local);
/// Maps a parent-frame point into p's local frame.
Point2 se2_apply_inverse(const Pose2D& p, Point2 world);

/// Below this half turn angle the arc integrator uses a series for sin(x)/x.
inline constexpr double kOmegaEpsilon = 1e-6;

/// Exact constant-twist integration of the unicycle model over dt seconds.
Pose2D unicycle_step(const Pose2D& p, const Twist& u, double dt);

struct RobotParams {
  double radius = 0.15;            // collision disc, m
  double clearance_height = 0.30;  // obstacles above this pass overhead, m
  double v_max = 0.5;              // m/s
  double omega_max = 1.5;          // rad/s
  double a_max = 1.0;              // m/s^2
  double alpha_max = 3.0;          // rad/s^2

  void validate() const;
};

/// Pinhole depth camera mounted at the robot origin, looking along +x, pitched down.
///
/// Camera axes: x right, y down (image rows), z forward (optical axis). A pixel
/// (u, v) at depth z maps to the camera-frame point z * ((u-cx)/fx, (v-cy)/fy, 1).
struct CameraModel {
  double fx = 210.0;
  double fy = 210.0;
  double cx = 212.0;
  double cy = 120.0;
  int width = 424;
  int height = 240;
  double mount_height = 0.25;
  double pitch = 0.40;  // rad, positive tilts the optical axis toward the floor
  double min_depth = 0.10;
  double max_depth = 4.0;

  void validate() const;

  /// Robot-frame direction of the ray through (u, v), scaled so that its
  /// optical-axis component is 1 (a point at depth z is origin + z * dir).
  Vec3 ray(double u, double v) const;
  /// Robot-frame position of the optical center.
  Vec3 origin() const { return {0.0, 0.0, mount_height}; }
  /// Robot-frame 3D point seen at pixel (u, v) with depth z.
  Vec3 back_project(double u, double v, double z) const;
  bool depth_valid(double z) const {
    return std::isfinite(z) && z >= min_depth && z <= max_depth;
  }
};

struct Cell {
  int col = 0;
  int row = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Regular 2D grid; cell (0,0) has its lower corner at origin. Indexing is
/// lower-inclusive and upper-exclusive on every axis.
struct GridGeometry {
  double resolution = 0.05;
  Pose2D origin;
  int cols = 1;
  int rows = 1;

  void validate() const;
  std::size_t size() const { return static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows); }
  bool contains(Cell c) const { return c.col >= 0 && c.row >= 0 && c.col < cols && c.row < rows; }
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols) +
           static_cast<std::size_t>(c.col);
  }
  Cell cell_at(std::size_t i) const {
    return {static_cast<int>(i % static_cast<std::size_t>(cols)),
            static_cast<int>(i / static_cast<std::size_t>(cols))};
  }
};

/// Cell containing world point (x, y), or nullopt when the point is off the grid.
std::optional<Cell> world_to_grid(const GridGeometry& g, double x, double y);
/// World coordinates of a cell center. Throws std::out_of_range for cells off the grid.
Point2 grid_to_world(const GridGeometry& g, Cell c);

}  // namespace groundnav
