#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace groundnav {

/// Metric depth image. A sample is invalid when it is 0 or non-finite.
struct DepthFrame {
  int width = 0;
  int height = 0;
  std::vector<double> depth;  // row-major, meters
  double timestamp = 0.0;

  DepthFrame() = default;
  DepthFrame(int w, int h, double stamp = 0.0)
      : width(w), height(h), depth(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0.0),
        timestamp(stamp) {}

  double at(int u, int v) const { return depth[static_cast<std::size_t>(v) * width + u]; }
  double& at(int u, int v) { return depth[static_cast<std::size_t>(v) * width + u]; }
};

}  // namespace groundnav
