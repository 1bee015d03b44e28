#include "groundnav/groundseg.hpp"

#include <array>
#include <cmath>

#include "groundnav/errors.hpp"
#include "groundnav/pnm.hpp"

namespace groundnav::seg {

void SegParams::validate() const {
  if (!(tau_ground > 0.0 && tau_ground <= tau_obstacle)) {
    throw ValidationError("segmentation thresholds must satisfy 0 < tau_ground <= tau_obstacle");
  }
  if (column_stride < 1 || row_stride < 1) throw ValidationError("strides must be >= 1");
  if (min_obstacle_hits < 1) throw ValidationError("min_obstacle_hits must be >= 1");
  if (!(map_range > 0.0 && map_resolution > 0.0)) {
    throw ValidationError("map range and resolution must be positive");
  }
  if (!(clearance_height > tau_obstacle)) {
    throw ValidationError("clearance_height must exceed tau_obstacle");
  }
  if (!(face_slope > 0.0)) throw ValidationError("face_slope must be positive");
  if (!(face_min_rise >= 0.0)) throw ValidationError("face_min_rise must be non-negative");
  if (face_window < 1) throw ValidationError("face_window must be >= 1");
}

namespace {

// sin(pitch) + ((v - cy)/fy) cos(pitch): downward slope of the ray per unit depth.
double drop_rate(const CameraModel& cam, double v) {
  return std::sin(cam.pitch) + ((v - cam.cy) / cam.fy) * std::cos(cam.pitch);
}

}  // namespace

std::optional<double> expected_ground_depth(const CameraModel& cam, double v) {
  const double denom = drop_rate(cam, v);
  if (!(denom > 0.0)) return std::nullopt;
  return cam.mount_height / denom;
}

double height_above_ground(const CameraModel& cam, double v, double z) {
  return cam.mount_height - z * drop_rate(cam, v);
}

PixelClass classify_pixel(const CameraModel& cam, const SegParams& params, double /*u*/, double v,
                          double z) {
  if (!cam.depth_valid(z)) return PixelClass::Unknown;
  const double h = height_above_ground(cam, v, z);
  if (std::abs(h) <= params.tau_ground) return PixelClass::Ground;
  if (h > params.clearance_height) return PixelClass::Overhead;
  if (h > params.tau_obstacle) return PixelClass::Obstacle;
  return PixelClass::Unknown;
}

PixelClassFrame segment(const DepthFrame& frame, const CameraModel& cam, const SegParams& params) {
  if (frame.width != cam.width || frame.height != cam.height ||
      frame.depth.size() != static_cast<std::size_t>(frame.width) * frame.height) {
    throw DimensionMismatch("depth frame is " + std::to_string(frame.width) + "x" +
                            std::to_string(frame.height) + ", camera expects " +
                            std::to_string(cam.width) + "x" + std::to_string(cam.height));
  }
  PixelClassFrame out;
  out.width = frame.width;
  out.height = frame.height;
  out.classes.assign(frame.depth.size(), PixelClass::Unknown);

  const int su = params.column_stride;
  const int sv = params.row_stride;
  const int lw = (frame.width + su - 1) / su;  // lattice size
  const int lh = (frame.height + sv - 1) / sv;
  struct Sample {
    bool valid = false;
    double h = 0.0;
    double x = 0.0;
    double y = 0.0;
    double r = 0.0;
  };
  std::vector<Sample> lattice(static_cast<std::size_t>(lw) * lh);
  const double sp = std::sin(cam.pitch);
  const double cp = std::cos(cam.pitch);
  for (int j = 0; j < lh; ++j) {
    const int v = j * sv;
    const double b = (v - cam.cy) / cam.fy;
    for (int i = 0; i < lw; ++i) {
      const int u = i * su;
      const double z = frame.at(u, v);
      const std::size_t idx = static_cast<std::size_t>(v) * frame.width + u;
      out.classes[idx] = classify_pixel(cam, params, u, v, z);
      if (!cam.depth_valid(z)) continue;
      Sample& smp = lattice[static_cast<std::size_t>(j) * lw + i];
      smp.valid = true;
      smp.h = height_above_ground(cam, v, z);
      smp.x = z * (cp - b * sp);
      smp.y = -z * (u - cam.cx) / cam.fx;
      smp.r = std::hypot(smp.x, smp.y);
    }
  }

  // Near-vertical surfaces: a low sample p with a nearby sample q that rises
  // steeply above it (rise > face_slope * horizontal run) sits on a face. For q
  // straight above p in the same column only the approach toward the camera
  // counts as run: the floor approaches going down the image, a face barely
  // does and a surface curving away recedes.
  std::vector<std::size_t> promote;
  for (int j = 0; j < lh; ++j) {
    for (int i = 0; i < lw; ++i) {
      const Sample& p = lattice[static_cast<std::size_t>(j) * lw + i];
      if (!p.valid || p.h > params.tau_obstacle || p.h < -params.tau_ground) continue;
      bool face = false;
      for (int dj = -params.face_window; dj <= 1 && !face; ++dj) {
        const int qj = j + dj;
        if (qj < 0 || qj >= lh) continue;
        for (int di = -1; di <= 1 && !face; ++di) {
          const int qi = i + di;
          if (qi < 0 || qi >= lw || (di == 0 && dj == 0)) continue;
          const Sample& q = lattice[static_cast<std::size_t>(qj) * lw + qi];
          if (!q.valid || q.h > params.clearance_height) continue;
          const double rise = q.h - p.h;
          if (rise <= params.face_min_rise) continue;
          const double run = (di == 0 && dj < 0) ? std::max(0.0, q.r - p.r) : std::hypot(q.x - p.x, q.y - p.y);
          face = rise > params.face_slope * run;
        }
      }
      if (face) promote.push_back(static_cast<std::size_t>(j * sv) * frame.width + i * su);
    }
  }
  for (const std::size_t idx : promote) out.classes[idx] = PixelClass::Obstacle;
  return out;
}

TraversabilityMap make_traversability_map(const SegParams& params) {
  TraversabilityMap map;
  const int n = static_cast<int>(std::ceil(2.0 * params.map_range / params.map_resolution - 1e-9));
  const int half = n / 2;
  map.geometry.resolution = params.map_resolution;
  map.geometry.cols = 2 * half;
  map.geometry.rows = 2 * half;
  map.geometry.origin = {-half * params.map_resolution, -half * params.map_resolution, 0.0};
  map.cells.assign(map.geometry.size(), CellState::Unknown);
  return map;
}

TraversabilityMap project_to_traversability(const PixelClassFrame& classes,
                                            const DepthFrame& frame, const CameraModel& cam,
                                            const SegParams& params) {
  if (classes.width != frame.width || classes.height != frame.height) {
    throw DimensionMismatch("class frame and depth frame differ in size");
  }
  TraversabilityMap map = make_traversability_map(params);
  map.timestamp = frame.timestamp;
  const GridGeometry& g = map.geometry;
  std::vector<std::uint16_t> ground_hits(g.size(), 0);
  std::vector<std::uint16_t> obstacle_hits(g.size(), 0);

  const double inv_res = 1.0 / g.resolution;
  const double sp = std::sin(cam.pitch);
  const double cp = std::cos(cam.pitch);
  for (int v = 0; v < frame.height; v += params.row_stride) {
    const double b = (v - cam.cy) / cam.fy;
    for (int u = 0; u < frame.width; u += params.column_stride) {
      const PixelClass cls = classes.at(u, v);
      if (cls != PixelClass::Ground && cls != PixelClass::Obstacle) continue;
      // Same as cam.back_project(u, v, z), with the pitch terms hoisted.
      const double z = frame.at(u, v);
      const double px = z * (cp - b * sp);
      const double py = -z * (u - cam.cx) / cam.fx;
      const double fc = std::floor((px - g.origin.x) * inv_res);
      const double fr = std::floor((py - g.origin.y) * inv_res);
      if (fc < 0.0 || fr < 0.0 || fc >= g.cols || fr >= g.rows) continue;
      const std::size_t idx = g.index({static_cast<int>(fc), static_cast<int>(fr)});
      auto& counter = cls == PixelClass::Ground ? ground_hits[idx] : obstacle_hits[idx];
      if (counter < 0xffff) ++counter;
    }
  }
  for (std::size_t i = 0; i < map.cells.size(); ++i) {
    if (obstacle_hits[i] >= params.min_obstacle_hits) {
      map.cells[i] = CellState::Obstacle;
    } else if (ground_hits[i] > 0) {
      map.cells[i] = CellState::Traversable;
    }
  }
  return map;
}

std::string encode_classes_ppm(const PixelClassFrame& classes) {
  static constexpr std::array<std::array<std::uint8_t, 3>, 4> kColors{{
      {40, 40, 40},   // unknown
      {40, 200, 60},  // ground
      {220, 40, 40},  // obstacle
      {60, 90, 230},  // overhead
  }};
  pnm::Rgb8 img;
  img.width = classes.width;
  img.height = classes.height;
  img.pixels.reserve(classes.classes.size() * 3);
  for (PixelClass c : classes.classes) {
    const auto& rgb = kColors[static_cast<std::size_t>(c)];
    img.pixels.insert(img.pixels.end(), rgb.begin(), rgb.end());
  }
  return pnm::encode_ppm(img);
}

std::string encode_traversability_pgm(const TraversabilityMap& map) {
  const GridGeometry& g = map.geometry;
  pnm::Gray8 img;
  img.width = g.cols;
  img.height = g.rows;
  img.pixels.resize(g.size());
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      std::uint8_t value = 205;
      switch (map.at({c, r})) {
        case CellState::Traversable: value = 254; break;
        case CellState::Obstacle: value = 0; break;
        case CellState::Unknown: break;
      }
      img.pixels[static_cast<std::size_t>(g.rows - 1 - r) * g.cols + c] = value;
    }
  }
  return pnm::encode_pgm(img);
}

}  // namespace groundnav::seg
