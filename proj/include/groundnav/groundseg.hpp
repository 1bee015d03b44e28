#pragma once

// Ground segmentation straight from the depth image. Each pixel's depth is
// compared against the flat-floor model of a pinhole camera at known height
// and pitch; the resulting classes are back-projected into a robot-centric
// traversability grid.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "groundnav/core.hpp"
#include "groundnav/depth_frame.hpp"

namespace groundnav::seg {

enum class PixelClass : std::uint8_t { Unknown = 0, Ground = 1, Obstacle = 2, Overhead = 3 };

struct PixelClassFrame {
  int width = 0;
  int height = 0;
  std::vector<PixelClass> classes;

  PixelClass at(int u, int v) const { return classes[static_cast<std::size_t>(v) * width + u]; }
};

enum class CellState : std::uint8_t { Unknown = 0, Traversable = 1, Obstacle = 2 };

/// Robot-centric grid: x forward, y left, robot at the world point (0, 0),
/// which sits on the shared corner of the four central cells.
struct TraversabilityMap {
  GridGeometry geometry;
  std::vector<CellState> cells;
  double timestamp = 0.0;

  CellState at(Cell c) const { return cells[geometry.index(c)]; }
  CellState& at(Cell c) { return cells[geometry.index(c)]; }
};

struct SegParams {
  double tau_ground = 0.04;    // |H| at or below this is floor, m
  double tau_obstacle = 0.08;  // H above this is an obstacle, m
  int column_stride = 2;
  int row_stride = 2;
  int min_obstacle_hits = 2;
  double map_range = 4.0;
  double map_resolution = 0.05;
  double clearance_height = 0.30;  // returns above this are overhead
  // A sample at most tau_obstacle high is promoted to Obstacle when a sample
  // within face_window lattice rows above it (or one row below), at most one
  // lattice column over, rises more than face_min_rise and more than
  // face_slope times the horizontal run between them: both lie on a
  // near-vertical surface.
  double face_slope = 0.5;
  double face_min_rise = 0.01;
  int face_window = 6;

  void validate() const;
};

/// Depth of the floor at image row v, or nullopt at and above the horizon row.
std::optional<double> expected_ground_depth(const CameraModel& cam, double v);

/// Height above the floor of the point seen at row v with depth z.
double height_above_ground(const CameraModel& cam, double v, double z);

PixelClass classify_pixel(const CameraModel& cam, const SegParams& params, double u, double v,
                          double z);

/// Classifies the strided pixel lattice (u % column_stride == 0, v % row_stride == 0),
/// then promotes low samples lying on near-vertical surfaces to Obstacle.
/// Unsampled pixels stay Unknown. Throws DimensionMismatch if the frame and
/// camera disagree.
PixelClassFrame segment(const DepthFrame& frame, const CameraModel& cam, const SegParams& params);

/// Empty (all Unknown) robot-centric grid spanning +-map_range.
TraversabilityMap make_traversability_map(const SegParams& params);

/// Bins ground and obstacle pixels into the robot-centric grid. A cell is
/// Obstacle with at least min_obstacle_hits obstacle pixels, else Traversable
/// with at least one ground pixel, else Unknown.
TraversabilityMap project_to_traversability(const PixelClassFrame& classes,
                                            const DepthFrame& frame, const CameraModel& cam,
                                            const SegParams& params);

/// P6 image with fixed colors per class.
std::string encode_classes_ppm(const PixelClassFrame& classes);
/// P5 image: Traversable 254, Obstacle 0, Unknown 205; +x to the right, +y up.
std::string encode_traversability_pgm(const TraversabilityMap& map);

}  // namespace groundnav::seg
