#include <cmath>

#include "groundnav/runtime.hpp"

namespace groundnav::runtime {

namespace {

seg::PixelClass truth_class(const sim::LabelFrame& lf, std::size_t i, double clearance_height) {
  switch (lf.labels[i]) {
    case sim::SurfaceLabel::None: return seg::PixelClass::Unknown;
    case sim::SurfaceLabel::Ground: return seg::PixelClass::Ground;
    case sim::SurfaceLabel::Obstacle:
      return lf.hit_height[i] > clearance_height ? seg::PixelClass::Overhead : seg::PixelClass::Obstacle;
  }
  return seg::PixelClass::Unknown;
}

bool near_edge(const sim::LabelFrame& lf, int u, int v) {
  const std::size_t i = static_cast<std::size_t>(v) * lf.width + u;
  for (int dv = -1; dv <= 1; ++dv) {
    for (int du = -1; du <= 1; ++du) {
      const int nu = u + du;
      const int nv = v + dv;
      if (nu < 0 || nv < 0 || nu >= lf.width || nv >= lf.height) continue;
      const std::size_t j = static_cast<std::size_t>(nv) * lf.width + nu;
      if (lf.labels[j] != lf.labels[i] || lf.object[j] != lf.object[i]) return true;
    }
  }
  return false;
}

}  // namespace

SegAccuracy evaluate_segmentation(const seg::PixelClassFrame& pred, const sim::Rendering& truth,
                                  const sim::Scene& scene, const CameraModel& cam, const seg::SegParams& params,
                                  double max_range, double min_height) {
  const sim::LabelFrame& lf = truth.labels;
  if (pred.width != lf.width || pred.height != lf.height) {
    throw DimensionMismatch("prediction and label frames differ in size");
  }
  SegAccuracy acc;
  for (int v = 0; v < pred.height; v += params.row_stride) {
    for (int u = 0; u < pred.width; u += params.column_stride) {
      const std::size_t i = static_cast<std::size_t>(v) * pred.width + u;
      const seg::PixelClass want = truth_class(lf, i, params.clearance_height);
      ++acc.sampled;
      if (pred.classes[i] == want) ++acc.agree;
      if (lf.labels[i] != sim::SurfaceLabel::Obstacle || pred.classes[i] != seg::PixelClass::Ground) continue;
      if (scene.object_height(lf.object[i]) < min_height) continue;
      const Vec3 p = cam.back_project(u, v, truth.depth.depth[i]);
      if (std::hypot(p.x, p.y) > max_range) continue;
      if (near_edge(lf, u, v)) continue;
      ++acc.obstacle_as_ground;
    }
  }
  return acc;
}

}  // namespace groundnav::runtime
