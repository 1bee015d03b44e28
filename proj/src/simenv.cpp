#include "groundnav/simenv.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <string>

#include "groundnav/errors.hpp"

namespace groundnav::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = -kInf;
  double hi = kInf;
  bool empty() const { return lo > hi; }
};

// Parameter interval where origin + t * dir lies inside [lo, hi] on one axis.
Interval slab(double origin, double dir, double lo, double hi) {
  if (dir == 0.0) {
    if (origin < lo || origin > hi) return {kInf, -kInf};
    return {};
  }
  double t0 = (lo - origin) / dir;
  double t1 = (hi - origin) / dir;
  if (t0 > t1) std::swap(t0, t1);
  return {t0, t1};
}

Interval intersect(Interval a, Interval b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

// Parameter interval inside the infinite vertical cylinder.
Interval circle_span(const Vec3& o, const Vec3& d, const Cylinder& c) {
  const double ox = o.x - c.cx;
  const double oy = o.y - c.cy;
  const double a = d.x * d.x + d.y * d.y;
  const double cc = ox * ox + oy * oy - c.radius * c.radius;
  if (a == 0.0) {
    if (cc > 0.0) return {kInf, -kInf};
    return {};
  }
  const double b = 2.0 * (d.x * ox + d.y * oy);
  const double disc = b * b - 4.0 * a * cc;
  if (disc < 0.0) return {kInf, -kInf};
  const double sq = std::sqrt(disc);
  return {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)};
}

// Entry parameter of the ray into a solid, or +inf when it misses or starts inside.
double entry(Interval span) {
  if (span.empty() || span.lo <= 0.0) return kInf;
  return span.lo;
}

double box_hit(const Vec3& o, const Vec3& d, const Box& b) {
  Interval s = slab(o.x, d.x, b.x_min, b.x_max);
  s = intersect(s, slab(o.y, d.y, b.y_min, b.y_max));
  s = intersect(s, slab(o.z, d.z, 0.0, b.height));
  return entry(s);
}

double cylinder_hit(const Vec3& o, const Vec3& d, const Cylinder& c) {
  return entry(intersect(circle_span(o, d, c), slab(o.z, d.z, 0.0, c.height)));
}

// Horizontal angular extent of an object seen from the camera, relative to the
// robot heading. `all` when the camera stands inside the footprint.
struct AngularSpan {
  double center = 0.0;
  double half = kPi;
  bool all = true;
};

AngularSpan box_span(const Box& b, double ox, double oy, double heading) {
  if (ox >= b.x_min && ox <= b.x_max && oy >= b.y_min && oy <= b.y_max) return {};
  const double mid = std::atan2(0.5 * (b.y_min + b.y_max) - oy, 0.5 * (b.x_min + b.x_max) - ox);
  double lo = 0.0;
  double hi = 0.0;
  for (const double x : {b.x_min, b.x_max}) {
    for (const double y : {b.y_min, b.y_max}) {
      const double phi = normalize_angle(std::atan2(y - oy, x - ox) - mid);
      lo = std::min(lo, phi);
      hi = std::max(hi, phi);
    }
  }
  return {normalize_angle(mid + 0.5 * (lo + hi) - heading), 0.5 * (hi - lo), false};
}

AngularSpan cylinder_span(const Cylinder& c, double ox, double oy, double heading) {
  const double d = std::hypot(c.cx - ox, c.cy - oy);
  if (d <= c.radius) return {};
  return {normalize_angle(std::atan2(c.cy - oy, c.cx - ox) - heading), std::asin(c.radius / d), false};
}

bool overlaps(const AngularSpan& a, double center, double half) {
  return a.all || std::abs(normalize_angle(a.center - center)) <= a.half + half + 1e-9;
}

double bounding_radius(const Box& b) {
  return 0.5 * std::hypot(b.x_max - b.x_min, b.y_max - b.y_min);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

void Scene::validate() const {
  require(bounds.x_min < bounds.x_max && bounds.y_min < bounds.y_max,
          "scene bounds must have positive extent");
  for (const Box& b : boxes) {
    require(b.x_min < b.x_max && b.y_min < b.y_max, "box extents must be positive");
    require(std::isfinite(b.height) && b.height > 0.0, "box height must be positive");
  }
  for (const Cylinder& c : cylinders) {
    require(std::isfinite(c.radius) && c.radius > 0.0, "cylinder radius must be positive");
    require(std::isfinite(c.height) && c.height > 0.0, "cylinder height must be positive");
  }
}

double Scene::object_height(int id) const {
  const auto nb = static_cast<int>(boxes.size());
  return id < nb ? boxes[static_cast<std::size_t>(id)].height
                 : cylinders[static_cast<std::size_t>(id - nb)].height;
}

Rendering render_depth(const Scene& scene, const Pose2D& robot_pose, const CameraModel& cam,
                       const RenderOptions& options) {
  const int su = std::max(1, options.stride_u);
  const int sv = std::max(1, options.stride_v);
  Rendering out;
  out.depth = DepthFrame(cam.width, cam.height, options.timestamp);
  LabelFrame& lf = out.labels;
  lf.width = cam.width;
  lf.height = cam.height;
  const std::size_t n = out.depth.depth.size();
  lf.labels.assign(n, SurfaceLabel::None);
  lf.hit_height.assign(n, 0.0);
  lf.object.assign(n, -1);

  const double c = std::cos(robot_pose.theta);
  const double s = std::sin(robot_pose.theta);
  const Vec3 origin{robot_pose.x, robot_pose.y, cam.mount_height};

  // Rays have |dir| <= this, so anything farther than reach never yields a valid sample.
  const double max_a = std::max(cam.cx, cam.width - 1 - cam.cx) / cam.fx;
  const double max_b = std::max(cam.cy, cam.height - 1 - cam.cy) / cam.fy;
  const double reach = cam.max_depth * std::sqrt(1.0 + max_a * max_a + max_b * max_b);
  std::vector<int> boxes;
  std::vector<int> cylinders;
  for (std::size_t i = 0; i < scene.boxes.size(); ++i) {
    const Box& b = scene.boxes[i];
    const double dist = std::hypot(0.5 * (b.x_min + b.x_max) - origin.x,
                                   0.5 * (b.y_min + b.y_max) - origin.y);
    if (dist - bounding_radius(b) <= reach) boxes.push_back(static_cast<int>(i));
  }
  for (std::size_t i = 0; i < scene.cylinders.size(); ++i) {
    const Cylinder& cy = scene.cylinders[i];
    if (std::hypot(cy.cx - origin.x, cy.cy - origin.y) - cy.radius <= reach) {
      cylinders.push_back(static_cast<int>(i));
    }
  }
  const int n_boxes = static_cast<int>(scene.boxes.size());
  const double sp = std::sin(cam.pitch);
  const double cp = std::cos(cam.pitch);

  std::vector<AngularSpan> box_spans;
  std::vector<AngularSpan> cylinder_spans;
  for (int i : boxes) box_spans.push_back(box_span(scene.boxes[static_cast<std::size_t>(i)], origin.x, origin.y, robot_pose.theta));
  for (int i : cylinders) {
    cylinder_spans.push_back(cylinder_span(scene.cylinders[static_cast<std::size_t>(i)], origin.x, origin.y, robot_pose.theta));
  }
  const double b_first = (0 - cam.cy) / cam.fy;
  const double b_last = (cam.height - 1 - cam.cy) / cam.fy;
  std::vector<int> column_boxes;
  std::vector<int> column_cylinders;

  for (int u = 0; u < cam.width; u += su) {
    // Azimuth of this column's rays (relative to the heading) varies with the row;
    // cull objects whose angular extent misses the whole range.
    const double a = (u - cam.cx) / cam.fx;
    const double az0 = std::atan2(-a, cp - b_first * sp);
    const double az1 = std::atan2(-a, cp - b_last * sp);
    const double az_mid = 0.5 * (az0 + az1);
    const double az_half = 0.5 * std::abs(az1 - az0);
    column_boxes.clear();
    column_cylinders.clear();
    for (std::size_t k = 0; k < boxes.size(); ++k) {
      if (overlaps(box_spans[k], az_mid, az_half)) column_boxes.push_back(boxes[k]);
    }
    for (std::size_t k = 0; k < cylinders.size(); ++k) {
      if (overlaps(cylinder_spans[k], az_mid, az_half)) column_cylinders.push_back(cylinders[k]);
    }
    for (int v = 0; v < cam.height; v += sv) {
      const double b = (v - cam.cy) / cam.fy;
      const Vec3 r{cp - b * sp, -a, -(sp + b * cp)};
      const Vec3 d{c * r.x - s * r.y, s * r.x + c * r.y, r.z};
      double best = kInf;
      int hit_object = -1;
      SurfaceLabel label = SurfaceLabel::None;
      if (d.z < 0.0) {
        best = -origin.z / d.z;
        label = SurfaceLabel::Ground;
      }
      for (int i : column_boxes) {
        const double t = box_hit(origin, d, scene.boxes[static_cast<std::size_t>(i)]);
        if (t < best) {
          best = t;
          label = SurfaceLabel::Obstacle;
          hit_object = i;
        }
      }
      for (int i : column_cylinders) {
        const double t = cylinder_hit(origin, d, scene.cylinders[static_cast<std::size_t>(i)]);
        if (t < best) {
          best = t;
          label = SurfaceLabel::Obstacle;
          hit_object = n_boxes + i;
        }
      }
      if (!(best >= cam.min_depth && best <= cam.max_depth)) continue;
      const std::size_t idx = static_cast<std::size_t>(v) * cam.width + u;
      out.depth.depth[idx] = best;
      lf.labels[idx] = label;
      lf.hit_height[idx] = label == SurfaceLabel::Ground ? 0.0 : origin.z + best * d.z;
      lf.object[idx] = hit_object;
    }
  }

  const DepthNoise& noise = options.noise;
  if (noise.sigma > 0.0 || noise.dropout > 0.0) {
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> gauss(0.0, noise.sigma > 0.0 ? noise.sigma : 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      double& z = out.depth.depth[i];
      if (z == 0.0) continue;
      if (noise.dropout > 0.0 && unit(rng) < noise.dropout) {
        z = 0.0;
      } else if (noise.sigma > 0.0) {
        z = std::clamp(z + gauss(rng), cam.min_depth, cam.max_depth);
      }
      if (z == 0.0) {
        lf.labels[i] = SurfaceLabel::None;
        lf.hit_height[i] = 0.0;
        lf.object[i] = -1;
      }
    }
  }
  return out;
}

Twist limit_command(const Twist& current, const Twist& cmd, double dt, const RobotParams& params) {
  const double v_target = std::clamp(cmd.v, -params.v_max, params.v_max);
  const double w_target = std::clamp(cmd.omega, -params.omega_max, params.omega_max);
  const double dv = params.a_max * dt;
  const double dw = params.alpha_max * dt;
  return {std::clamp(v_target, current.v - dv, current.v + dv),
          std::clamp(w_target, current.omega - dw, current.omega + dw)};
}

SimState step_sim(const SimState& state, const Twist& cmd, double dt, const RobotParams& params) {
  SimState next;
  next.robot_twist = limit_command(state.robot_twist, cmd, dt, params);
  next.robot_pose = unicycle_step(state.robot_pose, next.robot_twist, dt);
  next.time = state.time + dt;
  return next;
}

double obstacle_distance(const Scene& scene, double x, double y) {
  double best = kInf;
  for (const Box& b : scene.boxes) {
    const double dx = std::max({b.x_min - x, 0.0, x - b.x_max});
    const double dy = std::max({b.y_min - y, 0.0, y - b.y_max});
    best = std::min(best, std::hypot(dx, dy));
  }
  for (const Cylinder& c : scene.cylinders) {
    best = std::min(best, std::max(0.0, std::hypot(x - c.cx, y - c.cy) - c.radius));
  }
  return best;
}

bool check_collision(const Scene& scene, const Pose2D& pose, const RobotParams& params) {
  const double r = params.radius;
  const Bounds& bd = scene.bounds;
  if (pose.x - r < bd.x_min || pose.x + r > bd.x_max || pose.y - r < bd.y_min ||
      pose.y + r > bd.y_max) {
    return true;
  }
  return obstacle_distance(scene, pose.x, pose.y) < r;
}

}  // namespace groundnav::sim
