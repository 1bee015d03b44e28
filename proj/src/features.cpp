#include <algorithm>
#include <cmath>
#include <limits>

#include "groundnav/policy_learn.hpp"

namespace groundnav::learn {

FeatureVector extract_features(const local::PolicyInput& in, const RobotParams& robot) {
  FeatureVector f{};
  const seg::TraversabilityMap& tmap = *in.tmap;
  const GridGeometry& g = tmap.geometry;
  const double map_range = 0.5 * g.cols * g.resolution;
  std::array<double, kSectorCount> nearest;
  nearest.fill(std::numeric_limits<double>::infinity());
  const double sector_width = kPi / kSectorCount;

  for (std::size_t i = 0; i < tmap.cells.size(); ++i) {
    if (tmap.cells[i] == seg::CellState::Traversable) continue;
    const Point2 p = grid_to_world(g, g.cell_at(i));
    if (p.x < 0.0) continue;  // only the forward half-plane can fall in [-pi/2, pi/2)
    const double bearing = std::atan2(p.y, p.x);
    if (bearing < -kPi / 2.0 || bearing >= kPi / 2.0) continue;
    const int k = std::min(kSectorCount - 1,
                           static_cast<int>(std::floor((bearing + kPi / 2.0) / sector_width)));
    auto& best = nearest[static_cast<std::size_t>(k)];
    best = std::min(best, std::hypot(p.x, p.y));
  }
  for (int k = 0; k < kSectorCount; ++k) {
    const double r = nearest[static_cast<std::size_t>(k)];
    f[static_cast<std::size_t>(k)] = std::isfinite(r) ? std::min(r / map_range, 1.0) : 1.0;
  }
  f[kSectorCount + 0] = std::min(in.goal_distance, kGoalDistanceClip) / kGoalDistanceClip;
  f[kSectorCount + 1] = std::sin(in.target.bearing);
  f[kSectorCount + 2] = std::cos(in.target.bearing);
  f[kSectorCount + 3] = std::clamp(in.current.v / robot.v_max, -1.0, 1.0);
  f[kSectorCount + 4] = std::clamp(in.current.omega / robot.omega_max, -1.0, 1.0);
  return f;
}

}  // namespace groundnav::learn
