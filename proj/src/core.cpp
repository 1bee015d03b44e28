#include "groundnav/core.hpp"

#include <stdexcept>
#include <string>

#include "groundnav/errors.hpp"

namespace groundnav {

double normalize_angle(double a) {
  double r = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

Pose2D se2_compose(const Pose2D& a, const Pose2D& b) {
  const double c = std::cos(a.theta);
  const double s = std::sin(a.theta);
  return {a.x + c * b.x - s * b.y, a.y + s * b.x + c * b.y, normalize_angle(a.theta + b.theta)};
}

Pose2D se2_inverse(const Pose2D& p) {
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  return {-c * p.x - s * p.y, s * p.x - c * p.y, normalize_angle(-p.theta)};
}

Point2 se2_apply(const Pose2D& p, Point2 local) {
  if (p.theta == 0.0) return {p.x + local.x, p.y + local.y};
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  return {p.x + c * local.x - s * local.y, p.y + s * local.x + c * local.y};
}

Point2 se2_apply_inverse(const Pose2D& p, Point2 world) {
  if (p.theta == 0.0) return {world.x - p.x, world.y - p.y};
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  const double dx = world.x - p.x;
  const double dy = world.y - p.y;
  return {c * dx + s * dy, -s * dx + c * dy};
}

Pose2D unicycle_step(const Pose2D& p, const Twist& u, double dt) {
  // Chord form: the arc's endpoint lies at distance v*dt*sinc(half) along the
  // mean heading. Unlike r*(sin - sin) it stays accurate as omega -> 0.
  const double half = 0.5 * u.omega * dt;
  const double sinc = std::abs(half) > kOmegaEpsilon ? std::sin(half) / half : 1.0 - half * half / 6.0;
  const double chord = u.v * dt * sinc;
  const double mid = p.theta + half;
  return {p.x + chord * std::cos(mid), p.y + chord * std::sin(mid), normalize_angle(p.theta + u.omega * dt)};
}

namespace {
void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(what);
}
bool positive(double v) { return std::isfinite(v) && v > 0.0; }
}  // namespace

void RobotParams::validate() const {
  require(positive(radius), "robot radius must be positive and finite");
  require(positive(clearance_height), "robot clearance_height must be positive and finite");
  require(positive(v_max), "robot v_max must be positive and finite");
  require(positive(omega_max), "robot omega_max must be positive and finite");
  require(positive(a_max), "robot a_max must be positive and finite");
  require(positive(alpha_max), "robot alpha_max must be positive and finite");
}

void CameraModel::validate() const {
  require(positive(fx) && positive(fy), "camera focal lengths must be positive");
  require(width > 0 && height > 0, "camera dimensions must be positive");
  require(std::isfinite(cx) && cx >= 0.0 && cx < width, "camera cx must lie in [0, width)");
  require(std::isfinite(cy) && cy >= 0.0 && cy < height, "camera cy must lie in [0, height)");
  require(positive(min_depth) && std::isfinite(max_depth) && min_depth < max_depth,
          "camera depth range must satisfy 0 < min_depth < max_depth");
  require(positive(mount_height), "camera mount_height must be positive");
  require(std::isfinite(pitch) && std::abs(pitch) < kPi / 2.0, "camera |pitch| must be < pi/2");
}

Vec3 CameraModel::ray(double u, double v) const {
  const double a = (u - cx) / fx;
  const double b = (v - cy) / fy;
  const double sp = std::sin(pitch);
  const double cp = std::cos(pitch);
  return {cp - b * sp, -a, -(sp + b * cp)};
}

Vec3 CameraModel::back_project(double u, double v, double z) const {
  const Vec3 d = ray(u, v);
  return {z * d.x, z * d.y, mount_height + z * d.z};
}

void GridGeometry::validate() const {
  require(positive(resolution), "grid resolution must be positive");
  require(cols >= 1 && rows >= 1, "grid must have at least one row and column");
  require(std::isfinite(origin.x) && std::isfinite(origin.y) && std::isfinite(origin.theta),
          "grid origin must be finite");
}

std::optional<Cell> world_to_grid(const GridGeometry& g, double x, double y) {
  const Point2 local = se2_apply_inverse(g.origin, {x, y});
  const double fc = std::floor(local.x / g.resolution);
  const double fr = std::floor(local.y / g.resolution);
  if (!(fc >= 0.0 && fr >= 0.0 && fc < g.cols && fr < g.rows)) return std::nullopt;
  return Cell{static_cast<int>(fc), static_cast<int>(fr)};
}

Point2 grid_to_world(const GridGeometry& g, Cell c) {
  if (!g.contains(c)) {
    throw std::out_of_range("cell (" + std::to_string(c.col) + ", " + std::to_string(c.row) +
                            ") is outside the grid");
  }
  return se2_apply(g.origin, {(c.col + 0.5) * g.resolution, (c.row + 0.5) * g.resolution});
}

}  // namespace groundnav
