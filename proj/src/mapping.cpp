#include "groundnav/mapping.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>

#include "groundnav/errors.hpp"
#include "groundnav/pnm.hpp"

namespace groundnav::mapping {

Occupancy classify(double logodds) {
  if (logodds > kOccupiedThreshold) return Occupancy::Occupied;
  if (logodds < kFreeThreshold) return Occupancy::Free;
  return Occupancy::Unknown;
}

OccupancyGrid::OccupancyGrid(const GridGeometry& geometry)
    : geometry_(geometry), logodds_(geometry.size(), 0.0) {
  geometry_.validate();
}

void OccupancyGrid::set_logodds(Cell c, double value) {
  logodds_[geometry_.index(c)] = std::clamp(value, kLogOddsMin, kLogOddsMax);
}

void integrate(OccupancyGrid& grid, const seg::TraversabilityMap& tmap, const Pose2D& robot_pose) {
  const GridGeometry& tg = tmap.geometry;
  for (std::size_t i = 0; i < tmap.cells.size(); ++i) {
    const seg::CellState state = tmap.cells[i];
    if (state == seg::CellState::Unknown) continue;
    const Point2 local = grid_to_world(tg, tg.cell_at(i));
    const Point2 world = se2_apply(robot_pose, local);
    const auto cell = world_to_grid(grid.geometry(), world.x, world.y);
    if (!cell) continue;
    grid.add_logodds(*cell, state == seg::CellState::Obstacle ? kLogOddsHit : kLogOddsMiss);
  }
}

std::string encode_map_pgm(const OccupancyGrid& grid) {
  const GridGeometry& g = grid.geometry();
  pnm::Gray8 img;
  img.width = g.cols;
  img.height = g.rows;
  img.pixels.resize(g.size());
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      std::uint8_t value = 205;
      switch (grid.occupancy({c, r})) {
        case Occupancy::Occupied: value = 0; break;
        case Occupancy::Free: value = 254; break;
        case Occupancy::Unknown: break;
      }
      img.pixels[static_cast<std::size_t>(g.rows - 1 - r) * g.cols + c] = value;
    }
  }
  return pnm::encode_pgm(img);
}

std::string encode_map_meta(const OccupancyGrid& grid) {
  const GridGeometry& g = grid.geometry();
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "width = %d\nheight = %d\nresolution = %.17g\norigin_x = %.17g\norigin_y = "
                "%.17g\norigin_theta = %.17g\n",
                g.cols, g.rows, g.resolution, g.origin.x, g.origin.y, g.origin.theta);
  return buf;
}

namespace {

std::map<std::string, double> parse_meta(const std::string& text) {
  std::map<std::string, double> values;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("map sidecar: expected 'key = value'", line_no);
    auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw ParseError("map sidecar: invalid number for '" + key + "'", line_no);
    }
    if (!values.emplace(key, v).second) {
      throw ParseError("map sidecar: duplicate key '" + key + "'", line_no);
    }
  }
  return values;
}

}  // namespace

OccupancyGrid decode_map(const std::string& pgm_bytes, const std::string& meta_text) {
  const pnm::Gray8 img = pnm::decode_pgm(pgm_bytes);
  const auto meta = parse_meta(meta_text);
  auto get = [&](const char* key) {
    const auto it = meta.find(key);
    if (it == meta.end()) throw ParseError(std::string("map sidecar: missing '") + key + "'");
    return it->second;
  };
  GridGeometry g;
  g.resolution = get("resolution");
  g.origin = {get("origin_x"), get("origin_y"), normalize_angle(get("origin_theta"))};
  g.cols = static_cast<int>(get("width"));
  g.rows = static_cast<int>(get("height"));
  if (g.cols != img.width || g.rows != img.height) {
    throw ValidationError("map sidecar dimensions " + std::to_string(g.cols) + "x" +
                          std::to_string(g.rows) + " do not match image " +
                          std::to_string(img.width) + "x" + std::to_string(img.height));
  }
  g.validate();
  OccupancyGrid grid(g);
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      const std::uint8_t p = img.pixels[static_cast<std::size_t>(g.rows - 1 - r) * g.cols + c];
      double l = 0.0;
      if (p <= 50) l = kLogOddsMax;
      else if (p >= 250) l = kLogOddsMin;
      grid.set_logodds({c, r}, l);
    }
  }
  return grid;
}

std::filesystem::path meta_path_for(const std::filesystem::path& pgm_path) {
  std::filesystem::path p = pgm_path;
  p.replace_extension(".meta");
  return p;
}

void save_map(const OccupancyGrid& grid, const std::filesystem::path& pgm_path) {
  pnm::write_file(pgm_path, encode_map_pgm(grid));
  pnm::write_file(meta_path_for(pgm_path), encode_map_meta(grid));
}

OccupancyGrid load_map(const std::filesystem::path& pgm_path) {
  return decode_map(pnm::read_file(pgm_path), pnm::read_file(meta_path_for(pgm_path)));
}

Pose2D dead_reckoning_pose(const Pose2D& initial, std::span<const TimedTwist> history) {
  Pose2D p = initial;
  for (const TimedTwist& step : history) p = unicycle_step(p, step.twist, step.dt);
  return p;
}

void PoseHistory::record(double t, const Pose2D& pose) {
  if (!times_.empty() && t < times_.back()) {
    throw ValidationError("pose history must be recorded in time order");
  }
  times_.push_back(t);
  poses_.push_back(pose);
}

Pose2D PoseHistory::pose_at(double t) const {
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return poses_.front();
  return poses_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

void DeadReckoning::apply(const Twist& twist, double dt) {
  pose_ = unicycle_step(pose_, twist, dt);
  t_ += dt;
  history_.record(t_, pose_);
}

}  // namespace groundnav::mapping
