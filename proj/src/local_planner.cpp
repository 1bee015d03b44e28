#include "groundnav/local_planner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "groundnav/errors.hpp"

namespace groundnav::local {

namespace {

constexpr double kScoreTieEpsilon = 1e-12;

double lattice_value(double lo, double hi, int i, int n) {
  if (n == 1) return 0.5 * (lo + hi);
  return lo + (hi - lo) * i / (n - 1);
}

// Arc length the robot can drive along the candidate's curvature before its
// disc touches a non-traversable cell, sampled every clearance_step and capped.
// A candidate that does not translate makes no progress and gets 0.
double arc_clearance(const seg::TraversabilityMap& tmap, const Twist& twist, double radius,
                     const DWParams& params) {
  if (twist.v <= 0.0) return 0.0;
  const Twist unit{1.0, twist.omega / twist.v};
  const int steps = static_cast<int>(std::floor(params.clearance_cap / params.clearance_step + 1e-9));
  for (int k = 1; k <= steps; ++k) {
    const Pose2D p = unicycle_step({}, unit, k * params.clearance_step);
    if (disc_blocked(tmap, p.x, p.y, radius)) return (k - 1) * params.clearance_step;
  }
  return params.clearance_cap;
}

CandidateScore evaluate(const seg::TraversabilityMap& tmap, const Candidate& c,
                        const PolarTarget& target, const DWParams& params,
                        const RobotParams& robot) {
  CandidateScore s;
  const auto poses = rollout(c.twist, params);
  const double r = robot.radius + params.safety_margin;
  for (const Pose2D& p : poses) {
    if (disc_blocked(tmap, p.x, p.y, r)) return s;
  }
  s.feasible = true;
  s.clearance = arc_clearance(tmap, c.twist, robot.radius, params);
  const Pose2D& end = poses.empty() ? Pose2D{} : poses.back();
  const double tx = target.distance * std::cos(target.bearing);
  const double ty = target.distance * std::sin(target.bearing);
  s.heading_error = normalize_angle(std::atan2(ty - end.y, tx - end.x) - end.theta);
  s.score = params.w_heading * (1.0 - std::abs(s.heading_error) / kPi) +
            params.w_clearance * s.clearance / params.clearance_cap +
            params.w_speed * c.twist.v / robot.v_max;
  return s;
}

}  // namespace

void DWParams::validate() const {
  if (n_v < 1 || n_omega < 1) throw ValidationError("lattice sizes must be >= 1");
  if (!(horizon > 0.0 && rollout_dt > 0.0 && tick_dt > 0.0)) {
    throw ValidationError("horizon, rollout_dt and tick_dt must be positive");
  }
  if (!(w_heading >= 0.0 && w_clearance >= 0.0 && w_speed >= 0.0) ||
      std::abs(w_heading + w_clearance + w_speed - 1.0) > 1e-9) {
    throw ValidationError("score weights must be non-negative and sum to 1");
  }
  if (!(goal_tolerance > 0.0 && safety_margin >= 0.0 && clearance_cap > 0.0 && clearance_step > 0.0)) {
    throw ValidationError("goal_tolerance, safety_margin, clearance_cap and clearance_step out of range");
  }
}

std::vector<Candidate> candidate_lattice(const Twist& current, const DWParams& params,
                                         const RobotParams& robot) {
  const double dv = robot.a_max * params.tick_dt;
  const double dw = robot.alpha_max * params.tick_dt;
  double v_lo = std::max(0.0, current.v - dv);
  const double v_hi = std::clamp(current.v + dv, 0.0, robot.v_max);
  v_lo = std::min(v_lo, v_hi);
  double w_lo = std::max(-robot.omega_max, current.omega - dw);
  const double w_hi = std::clamp(current.omega + dw, -robot.omega_max, robot.omega_max);
  w_lo = std::min(w_lo, w_hi);

  std::vector<Candidate> out;
  out.reserve(static_cast<std::size_t>(params.n_v * params.n_omega));
  for (int iv = 0; iv < params.n_v; ++iv) {
    for (int iw = 0; iw < params.n_omega; ++iw) {
      out.push_back({{lattice_value(v_lo, v_hi, iv, params.n_v),
                      lattice_value(w_lo, w_hi, iw, params.n_omega)},
                     iv * params.n_omega + iw});
    }
  }
  return out;
}

std::vector<Pose2D> rollout(const Twist& twist, const DWParams& params) {
  const int steps = std::max(1, static_cast<int>(std::lround(params.horizon / params.rollout_dt)));
  std::vector<Pose2D> poses;
  poses.reserve(static_cast<std::size_t>(steps));
  for (int k = 1; k <= steps; ++k) poses.push_back(unicycle_step({}, twist, k * params.rollout_dt));
  return poses;
}

bool disc_blocked(const seg::TraversabilityMap& tmap, double x, double y, double radius) {
  const GridGeometry& g = tmap.geometry;
  const double res = g.resolution;
  const double lx = x - g.origin.x;
  const double ly = y - g.origin.y;
  const int r0 = static_cast<int>(std::floor((ly - radius) / res));
  const int r1 = static_cast<int>(std::floor((ly + radius) / res));
  const double r2 = radius * radius;
  for (int r = r0; r <= r1; ++r) {
    const double dy = std::max({r * res - ly, 0.0, ly - (r + 1) * res});
    const double rest = r2 - dy * dy;
    if (rest <= 0.0) continue;
    // Columns whose x-interval comes closer than sqrt(rest) to lx.
    const double w = std::sqrt(rest);
    int c0 = static_cast<int>(std::floor((lx - w) / res));
    int c1 = static_cast<int>(std::floor((lx + w) / res));
    // Trim the end columns against the exact squared test.
    auto touches = [&](int c) {
      const double dx = std::max({c * res - lx, 0.0, lx - (c + 1) * res});
      return dx * dx + dy * dy < r2;
    };
    while (c0 <= c1 && !touches(c0)) ++c0;
    while (c1 >= c0 && !touches(c1)) --c1;
    if (c0 > c1) continue;
    if (r < 0 || r >= g.rows || c0 < 0 || c1 >= g.cols) return true;
    const seg::CellState* row = tmap.cells.data() + static_cast<std::size_t>(r) * g.cols;
    for (int c = c0; c <= c1; ++c) {
      if (row[c] != seg::CellState::Traversable) return true;
    }
  }
  return false;
}

CandidateScore score_candidate(const seg::TraversabilityMap& tmap, const Candidate& c,
                               const PolarTarget& target, const DWParams& params,
                               const RobotParams& robot) {
  return evaluate(tmap, c, target, params, robot);
}

RuleDecision rule_policy(const PolicyInput& in, const DWParams& params, const RobotParams& robot) {
  RuleDecision d;
  if (in.goal_distance < params.goal_tolerance) {
    d.output.done = true;
    return d;
  }
  const seg::TraversabilityMap& tmap = *in.tmap;

  double best = -std::numeric_limits<double>::infinity();
  const Candidate* chosen = nullptr;
  const auto lattice = candidate_lattice(in.current, params, robot);
  for (const Candidate& c : lattice) {
    const CandidateScore s = evaluate(tmap, c, in.target, params, robot);
    if (!s.feasible) continue;
    ++d.n_feasible;
    bool take = false;
    if (chosen == nullptr || s.score > best + kScoreTieEpsilon) {
      take = true;
    } else if (s.score >= best - kScoreTieEpsilon) {
      take = std::abs(c.twist.omega) < std::abs(chosen->twist.omega) - kScoreTieEpsilon;
    }
    if (take) {
      best = s.score;
      chosen = &c;
    }
  }
  if (chosen == nullptr) {
    d.all_blocked = true;
    return d;
  }
  d.output.cmd = chosen->twist;
  d.score = best;
  d.chosen_index = chosen->index;
  return d;
}

PolicyOutput recovery(const PolicyInput& in, const RobotParams& robot) {
  constexpr int kSectors = 12;
  std::array<int, kSectors> free_cells{};
  const seg::TraversabilityMap& tmap = *in.tmap;
  const GridGeometry& g = tmap.geometry;
  for (std::size_t i = 0; i < tmap.cells.size(); ++i) {
    if (tmap.cells[i] != seg::CellState::Traversable) continue;
    const Point2 p = grid_to_world(g, g.cell_at(i));
    const double bearing = std::atan2(p.y, p.x);
    int k = static_cast<int>(std::floor((bearing + kPi) / (2.0 * kPi) * kSectors));
    free_cells[static_cast<std::size_t>(std::clamp(k, 0, kSectors - 1))]++;
  }
  int best = -1;
  double best_center = 0.0;
  for (int k = 0; k < kSectors; ++k) {
    const int count = free_cells[static_cast<std::size_t>(k)];
    if (count == 0) continue;
    const double center = -kPi + (k + 0.5) * 2.0 * kPi / kSectors;
    const int best_count = best < 0 ? -1 : free_cells[static_cast<std::size_t>(best)];
    bool take = count > best_count;
    if (count == best_count) {
      const double a = std::abs(center);
      const double b = std::abs(best_center);
      take = a < b - 1e-12 || (std::abs(a - b) <= 1e-12 && center > 0.0);
    }
    if (take) {
      best = k;
      best_center = center;
    }
  }
  const double direction = best >= 0 ? best_center : in.target.bearing;
  PolicyOutput out;
  out.cmd = {0.0, (direction >= 0.0 ? 0.5 : -0.5) * robot.omega_max};
  return out;
}

WaypointManager::WaypointManager(std::vector<Point2> waypoints, double lookahead)
    : waypoints_(std::move(waypoints)), lookahead_(lookahead) {
  if (waypoints_.empty()) throw ValidationError("waypoint list must not be empty");
}

WaypointTarget WaypointManager::update(const Pose2D& pose) {
  auto dist = [&](const Point2& w) { return std::hypot(w.x - pose.x, w.y - pose.y); };
  while (active_ + 1 < waypoints_.size() && dist(waypoints_[active_]) < lookahead_) ++active_;
  const Point2 local = se2_apply_inverse(pose, waypoints_[active_]);
  WaypointTarget out;
  out.target.distance = std::hypot(local.x, local.y);
  out.target.bearing = out.target.distance > 0.0 ? normalize_angle(std::atan2(local.y, local.x)) : 0.0;
  out.goal_distance = dist(waypoints_.back());
  out.active = active_;
  return out;
}

PolicyStep RulePolicy::act(const PolicyInput& in) {
  const RuleDecision d = rule_policy(in, params_, robot_);
  return {d.output, d.all_blocked, d.score, d.n_feasible};
}

}  // namespace groundnav::local
