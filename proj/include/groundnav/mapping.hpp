#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "groundnav/core.hpp"
#include "groundnav/groundseg.hpp"

namespace groundnav::mapping {

enum class Occupancy : std::uint8_t { Free, Unknown, Occupied };

inline constexpr double kLogOddsHit = 0.85;
inline constexpr double kLogOddsMiss = -0.41;
inline constexpr double kLogOddsMin = -10.0;
inline constexpr double kLogOddsMax = 10.0;
inline constexpr double kOccupiedThreshold = 0.85;
inline constexpr double kFreeThreshold = -0.85;

/// > +0.85 occupied, < -0.85 free, unknown in between.
Occupancy classify(double logodds);

class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  explicit OccupancyGrid(const GridGeometry& geometry);

  const GridGeometry& geometry() const { return geometry_; }
  double logodds(Cell c) const { return logodds_[geometry_.index(c)]; }
  /// Stores the value clamped to [kLogOddsMin, kLogOddsMax].
  void set_logodds(Cell c, double value);
  void add_logodds(Cell c, double delta) { set_logodds(c, logodds(c) + delta); }
  Occupancy occupancy(Cell c) const { return classify(logodds(c)); }
  const std::vector<double>& logodds_data() const { return logodds_; }

 private:
  GridGeometry geometry_;
  std::vector<double> logodds_;
};

/// Fuses a robot-centric traversability map observed at `robot_pose`:
/// Obstacle cells add kLogOddsHit, Traversable cells add kLogOddsMiss to the
/// world cell under their center. Off-grid cells are skipped.
void integrate(OccupancyGrid& grid, const seg::TraversabilityMap& tmap, const Pose2D& robot_pose);

/// P5 raster (occupied 0, free 254, unknown 205), top image row = highest grid row.
std::string encode_map_pgm(const OccupancyGrid& grid);
/// Sidecar text: width, height, resolution, origin_x, origin_y, origin_theta.
std::string encode_map_meta(const OccupancyGrid& grid);
/// Pixels <= 50 load as occupied (+10), >= 250 as free (-10), anything else
/// unknown (0). Throws ParseError or ValidationError.
OccupancyGrid decode_map(const std::string& pgm_bytes, const std::string& meta_text);

/// Sidecar path for a map image: `<dir>/<stem>.meta`.
std::filesystem::path meta_path_for(const std::filesystem::path& pgm_path);
void save_map(const OccupancyGrid& grid, const std::filesystem::path& pgm_path);
OccupancyGrid load_map(const std::filesystem::path& pgm_path);

struct TimedTwist {
  Twist twist;
  double dt = 0.0;
};

/// Odometry fallback: folds unicycle_step over the history.
Pose2D dead_reckoning_pose(const Pose2D& initial, std::span<const TimedTwist> history);

/// Stand-in for a SLAM pose output.
class PoseProvider {
 public:
  virtual ~PoseProvider() = default;
  /// Most recent pose at or before time t.
  virtual Pose2D pose_at(double t) const = 0;
};

/// Time-stamped pose log, e.g. simulator ground truth.
class PoseHistory : public PoseProvider {
 public:
  explicit PoseHistory(const Pose2D& initial, double t0 = 0.0) { record(t0, initial); }
  /// Times must be non-decreasing.
  void record(double t, const Pose2D& pose);
  Pose2D pose_at(double t) const override;

 private:
  std::vector<double> times_;
  std::vector<Pose2D> poses_;
};

/// Integrates commanded twists from a known initial pose.
class DeadReckoning : public PoseProvider {
 public:
  explicit DeadReckoning(const Pose2D& initial, double t0 = 0.0)
      : history_(initial, t0), pose_(initial), t_(t0) {}
  void apply(const Twist& twist, double dt);
  Pose2D pose_at(double t) const override { return history_.pose_at(t); }

 private:
  PoseHistory history_;
  Pose2D pose_;
  double t_;
};

}  // namespace groundnav::mapping
