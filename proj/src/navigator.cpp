#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#include <spdlog/spdlog.h>

#include "groundnav/mailbox.hpp"
#include "groundnav/runtime.hpp"

namespace groundnav::runtime {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct PerceptionSnapshot {
  std::shared_ptr<const seg::TraversabilityMap> tmap;
  Pose2D capture_pose;
  double time = 0.0;
};

bool box_overlaps_cell(const sim::Box& b, double x0, double x1, double y0, double y1) {
  return b.x_min < x1 && b.x_max > x0 && b.y_min < y1 && b.y_max > y0;
}

bool cylinder_overlaps_cell(const sim::Cylinder& c, double x0, double x1, double y0, double y1) {
  const double dx = c.cx - std::clamp(c.cx, x0, x1);
  const double dy = c.cy - std::clamp(c.cy, y0, y1);
  return dx * dx + dy * dy < c.radius * c.radius;
}

// Nearest non-lethal cell to `c` within `max_ring` rings, scanning rings outward
// in row-major order so the choice is deterministic.
std::optional<Cell> nearest_free(const planning::Costmap& cm, Cell c, int max_ring) {
  const GridGeometry& g = cm.geometry();
  if (g.contains(c) && !cm.lethal(c)) return c;
  std::optional<Cell> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int ring = 1; ring <= max_ring && !best; ++ring) {
    for (int dr = -ring; dr <= ring; ++dr) {
      for (int dc = -ring; dc <= ring; ++dc) {
        if (std::max(std::abs(dc), std::abs(dr)) != ring) continue;
        const Cell n{c.col + dc, c.row + dr};
        if (!g.contains(n) || cm.lethal(n)) continue;
        const double d = std::hypot(dc, dr);
        if (d < best_d) {
          best_d = d;
          best = n;
        }
      }
    }
  }
  return best;
}

struct PlanResult {
  std::vector<Point2> waypoints;
  std::optional<planning::PlanFailure> failure;
  std::string message;
};

PlanResult plan_waypoints(const mapping::OccupancyGrid& world, const RobotParams& robot, double inflation_radius,
                          const Pose2D& from, const Point2& goal, bool allow_start_snap) {
  PlanResult out;
  const planning::Costmap cm = planning::inflate(world, robot, inflation_radius);
  const GridGeometry& g = world.geometry();
  std::optional<Cell> start = world_to_grid(g, from.x, from.y);
  const std::optional<Cell> goal_cell = world_to_grid(g, goal.x, goal.y);
  if (start && allow_start_snap) start = nearest_free(cm, *start, 4);
  try {
    if (!start) throw planning::PlanningError(planning::PlanFailure::StartInvalid, "start is off the map");
    if (!goal_cell) throw planning::PlanningError(planning::PlanFailure::GoalInvalid, "goal is off the map");
    const planning::Path path = planning::plan(cm, *start, *goal_cell);
    const std::vector<Cell> cells = planning::shortcut(path, cm);
    for (const Cell& c : cells) out.waypoints.push_back(grid_to_world(g, c));
    out.waypoints.back() = goal;
  } catch (const planning::PlanningError& e) {
    out.failure = e.kind();
    out.message = e.what();
  }
  return out;
}

}  // namespace

void PipelineConfig::validate() const {
  if (!(control_rate > 0.0) || !std::isfinite(control_rate)) throw ConfigError("control_rate must be positive");
  if (!(replan_rate > 0.0) || !std::isfinite(replan_rate)) throw ConfigError("replan_rate must be positive");
  if (!(perception_rate >= 0.0) || !std::isfinite(perception_rate)) {
    throw ConfigError("perception_rate must be non-negative");
  }
  if (!(stale_timeout > 1.0 / control_rate)) throw ConfigError("stale_timeout must exceed one control period");
  if (!(timeout >= 0.0) || !std::isfinite(timeout)) throw ConfigError("timeout must be a non-negative number");
  if (!(recovery_limit > 0.0)) throw ConfigError("recovery_limit must be positive");
  if (!(lookahead > 0.0)) throw ConfigError("lookahead must be positive");
  if (!(planning_radius > 0.0) || !(inflation_radius >= planning_radius)) {
    throw ConfigError("need 0 < planning_radius <= inflation_radius");
  }
  if (!(stall_time > 0.0)) throw ConfigError("stall_time must be positive");
  seg.validate();
  dw.validate();
}

const char* to_string(NavState s) {
  switch (s) {
    case NavState::Idle: return "Idle";
    case NavState::Planning: return "Planning";
    case NavState::Following: return "Following";
    case NavState::Reached: return "Reached";
    case NavState::Failed: return "Failed";
  }
  return "?";
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Reached: return "Reached";
    case Outcome::Collision: return "Collision";
    case Outcome::Timeout: return "Timeout";
    case Outcome::Failed: return "Failed";
  }
  return "?";
}

bool NavStateMachine::legal(NavState from, NavState to) {
  switch (from) {
    case NavState::Idle: return to == NavState::Planning;
    case NavState::Planning: return to == NavState::Following || to == NavState::Failed;
    case NavState::Following:
      return to == NavState::Reached || to == NavState::Planning || to == NavState::Failed;
    case NavState::Reached:
    case NavState::Failed: return false;
  }
  return false;
}

void NavStateMachine::transition(NavState to, double time, std::string reason) {
  if (!legal(state_, to)) {
    throw std::logic_error(std::string("illegal navigator transition ") + to_string(state_) + " -> " +
                           to_string(to));
  }
  history_.push_back({time, state_, to});
  state_ = to;
  if (to == NavState::Failed) reason_ = std::move(reason);
}

mapping::OccupancyGrid build_prior_map(const Scenario& scn, bool include_unmapped) {
  const sim::Bounds& b = scn.scene.bounds;
  GridGeometry g;
  g.resolution = scn.map_resolution;
  g.origin = {b.x_min, b.y_min, 0.0};
  g.cols = std::max(1, static_cast<int>(std::ceil((b.x_max - b.x_min) / g.resolution - 1e-9)));
  g.rows = std::max(1, static_cast<int>(std::ceil((b.y_max - b.y_min) / g.resolution - 1e-9)));
  mapping::OccupancyGrid grid(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Cell c = g.cell_at(i);
    const double x0 = g.origin.x + c.col * g.resolution;
    const double y0 = g.origin.y + c.row * g.resolution;
    const double x1 = x0 + g.resolution;
    const double y1 = y0 + g.resolution;
    bool occupied = c.col == 0 || c.row == 0 || c.col == g.cols - 1 || c.row == g.rows - 1;
    for (const auto& box : scn.scene.boxes) {
      if ((box.mapped || include_unmapped) && box_overlaps_cell(box, x0, x1, y0, y1)) occupied = true;
    }
    for (const auto& cyl : scn.scene.cylinders) {
      if ((cyl.mapped || include_unmapped) && cylinder_overlaps_cell(cyl, x0, x1, y0, y1)) occupied = true;
    }
    grid.set_logodds(c, occupied ? mapping::kLogOddsMax : -1.0);
  }
  return grid;
}

seg::TraversabilityMap compose_local_map(const seg::TraversabilityMap& snapshot, const Pose2D& capture_pose,
                                         const mapping::OccupancyGrid& world, const Pose2D& pose,
                                         double footprint_radius) {
  seg::TraversabilityMap out = snapshot;
  const GridGeometry& g = snapshot.geometry;
  const GridGeometry& wg = world.geometry();
  // Current robot frame expressed in the capture frame, and in the world grid's frame.
  const Pose2D rel = se2_compose(se2_inverse(capture_pose), pose);
  const Pose2D in_world = se2_compose(se2_inverse(wg.origin), pose);
  const bool same_frame = rel.x == 0.0 && rel.y == 0.0 && rel.theta == 0.0;
  const double rc = std::cos(rel.theta), rs = std::sin(rel.theta);
  const double wc = std::cos(in_world.theta), ws = std::sin(in_world.theta);
  const double r2 = footprint_radius * footprint_radius;
  for (std::size_t i = 0; i < out.cells.size(); ++i) {
    const Cell c = g.cell_at(i);
    const double lx = g.origin.x + (c.col + 0.5) * g.resolution;
    const double ly = g.origin.y + (c.row + 0.5) * g.resolution;
    seg::CellState s = seg::CellState::Unknown;
    if (same_frame) {
      s = snapshot.cells[i];
    } else {
      const double qx = rel.x + rc * lx - rs * ly;
      const double qy = rel.y + rs * lx + rc * ly;
      const double fc = std::floor((qx - g.origin.x) / g.resolution);
      const double fr = std::floor((qy - g.origin.y) / g.resolution);
      if (fc >= 0.0 && fr >= 0.0 && fc < g.cols && fr < g.rows) {
        s = snapshot.at({static_cast<int>(fc), static_cast<int>(fr)});
      }
    }
    if (s == seg::CellState::Unknown) {
      const double wx = in_world.x + wc * lx - ws * ly;
      const double wy = in_world.y + ws * lx + wc * ly;
      const double fc = std::floor(wx / wg.resolution);
      const double fr = std::floor(wy / wg.resolution);
      if (fc >= 0.0 && fr >= 0.0 && fc < wg.cols && fr < wg.rows) {
        switch (world.occupancy({static_cast<int>(fc), static_cast<int>(fr)})) {
          case mapping::Occupancy::Occupied: s = seg::CellState::Obstacle; break;
          case mapping::Occupancy::Free: s = seg::CellState::Traversable; break;
          case mapping::Occupancy::Unknown: break;
        }
      }
      if (s == seg::CellState::Unknown && lx * lx + ly * ly < r2) s = seg::CellState::Traversable;
    }
    out.cells[i] = s;
  }
  return out;
}

RunReport run_navigation(const Scenario& scn, const PipelineConfig& cfg, local::Policy& policy,
                         const DecisionObserver& observer) {
  scn.validate();
  cfg.validate();
  RunReport report;
  NavStateMachine nav;
  const RobotParams& robot = scn.robot;
  const double dt = 1.0 / cfg.control_rate;
  const double replan_period = 1.0 / cfg.replan_rate;
  const double perception_period = cfg.perception_rate > 0.0 ? 1.0 / cfg.perception_rate : 0.0;
  const double footprint = robot.radius + cfg.dw.safety_margin + cfg.seg.map_resolution;
  constexpr double kTimeEps = 1e-9;

  mapping::OccupancyGrid world = build_prior_map(scn);
  sim::SimState sim{scn.start, {}, 0.0};
  mapping::PoseHistory truth(scn.start, 0.0);
  mapping::DeadReckoning odometry(scn.start, 0.0);
  auto estimate = [&](double t) {
    return cfg.pose_source == PoseSource::GroundTruth ? truth.pose_at(t) : odometry.pose_at(t);
  };

  Mailbox<PerceptionSnapshot> perception_box;
  std::uint64_t integrated_seq = 0;

  report.trajectory.push_back({0.0, sim.robot_pose, {}, NavState::Idle});
  auto finish = [&](Outcome outcome, std::string reason) {
    report.outcome = outcome;
    report.reason = std::move(reason);
    report.transitions = nav.history();
  };

  // Global plan on the current map.
  local::WaypointManager waypoints;
  RobotParams planning_robot = robot;
  planning_robot.radius = std::max(robot.radius, cfg.planning_radius);
  auto replan = [&](double t, bool snap_start) {
    const PlanResult pr =
        plan_waypoints(world, planning_robot, cfg.inflation_radius, estimate(t), scn.goal, snap_start);
    if (!pr.failure) waypoints = local::WaypointManager(pr.waypoints, cfg.lookahead);
    return pr;
  };

  nav.transition(NavState::Planning, 0.0);
  {
    const PlanResult pr = replan(0.0, false);
    if (pr.failure) {
      nav.transition(NavState::Failed, 0.0, planning::to_string(*pr.failure));
      spdlog::info("initial planning failed: {}", pr.message);
      finish(Outcome::Failed, planning::to_string(*pr.failure));
      return report;
    }
    report.initial_waypoints = waypoints.waypoints();
  }
  nav.transition(NavState::Following, 0.0);

  double next_perception = 0.0;
  double next_replan = replan_period;
  bool in_recovery = false;
  bool recovery_replanned = false;
  bool stalling = false;
  double stall_start = 0.0;
  constexpr double kStallSpeed = 1e-3;
  double recovery_start = 0.0;
  std::int64_t tick = 0;

  auto end_run = [&](Outcome outcome, NavState state, const std::string& reason) {
    if (state == NavState::Failed) {
      nav.transition(NavState::Failed, sim.time, reason);
    } else {
      nav.transition(NavState::Reached, sim.time);
    }
    report.trajectory.push_back({sim.time, sim.robot_pose, {}, nav.state()});
    finish(outcome, reason);
  };

  for (;; ++tick) {
    if (sim.time >= cfg.timeout - kTimeEps) {
      nav.transition(NavState::Failed, sim.time, "timeout");
      finish(Outcome::Timeout, "timeout");
      return report;
    }
    const double now = sim.time;
    const auto tick_start = Clock::now();
    TickRecord rec;
    rec.tick = tick;
    rec.time = now;

    // Perception worker.
    if (now >= next_perception - kTimeEps) {
      next_perception = perception_period > 0.0 ? next_perception + perception_period : now;
      sim::RenderOptions ro;
      ro.stride_u = cfg.seg.column_stride;
      ro.stride_v = cfg.seg.row_stride;
      ro.timestamp = now;
      ro.noise = {scn.noise_sigma, scn.noise_dropout, scn.seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(tick)};
      auto t0 = Clock::now();
      const sim::Rendering r = sim::render_depth(scn.scene, sim.robot_pose, scn.camera, ro);
      rec.render_s = seconds_since(t0);
      t0 = Clock::now();
      const seg::PixelClassFrame classes = seg::segment(r.depth, scn.camera, cfg.seg);
      rec.segment_s = seconds_since(t0);
      t0 = Clock::now();
      auto tmap = std::make_shared<const seg::TraversabilityMap>(
          seg::project_to_traversability(classes, r.depth, scn.camera, cfg.seg));
      rec.project_s = seconds_since(t0);
      perception_box.publish(std::make_shared<const PerceptionSnapshot>(
          PerceptionSnapshot{std::move(tmap), estimate(now), now}));
    }

    // Mapping / replanning worker.
    if (now >= next_replan - kTimeEps) {
      next_replan += replan_period;
      if (perception_box.sequence() != integrated_seq) {
        integrated_seq = perception_box.sequence();
        const auto snap = perception_box.latest();
        mapping::integrate(world, *snap->tmap, snap->capture_pose);
      }
      nav.transition(NavState::Planning, now);
      const PlanResult pr = replan(now, true);
      if (pr.failure) spdlog::debug("t={:.2f} replan failed ({}), keeping previous path", now, pr.message);
      ++report.replans;
      nav.transition(NavState::Following, now);
    }

    // Control loop.
    const Pose2D pose = estimate(now);
    const local::WaypointTarget wt = waypoints.update(pose);
    const auto snap = perception_box.latest();
    rec.perception_age = snap ? now - snap->time : std::numeric_limits<double>::infinity();
    Twist cmd{};
    if (!snap || rec.perception_age > cfg.stale_timeout + kTimeEps) {
      rec.watchdog = true;
      in_recovery = false;
    } else {
      const auto t0 = Clock::now();
      local::PolicyInput in;
      in.tmap = std::make_shared<const seg::TraversabilityMap>(
          compose_local_map(*snap->tmap, snap->capture_pose, world, pose, footprint));
      in.current = sim.robot_twist;
      in.target = wt.target;
      in.goal_distance = wt.goal_distance;
      const local::PolicyStep step = policy.act(in);
      rec.policy_s = seconds_since(t0);
      if (observer) observer(in, step);
      report.decisions.push_back({now, step.output.cmd, step.score, step.n_feasible, step.output.done});
      if (step.output.done) {
        rec.end_to_end_s = seconds_since(tick_start);
        rec.state = NavState::Reached;
        report.ticks.push_back(rec);
        end_run(Outcome::Reached, NavState::Reached, {});
        return report;
      }
      // Turning in place for too long without ever translating is treated
      // like a blocked front.
      bool stalled = false;
      if (!step.all_blocked) {
        if (step.output.cmd.v > kStallSpeed) {
          stalling = false;
        } else {
          if (!stalling) {
            stalling = true;
            stall_start = now;
          }
          stalled = now - stall_start >= cfg.stall_time - kTimeEps;
        }
      }
      if (step.all_blocked || stalled) {
        if (!in_recovery) {
          in_recovery = true;
          recovery_start = now;
        }
        if (now - recovery_start >= cfg.recovery_limit - kTimeEps) {
          if (recovery_replanned) {
            report.ticks.push_back(rec);
            end_run(Outcome::Failed, NavState::Failed, step.all_blocked ? "AllBlocked" : "Stalled");
            return report;
          }
          nav.transition(NavState::Planning, now);
          const PlanResult pr = replan(now, true);
          ++report.replans;
          if (pr.failure) {
            report.ticks.push_back(rec);
            nav.transition(NavState::Failed, now, planning::to_string(*pr.failure));
            report.trajectory.push_back({now, sim.robot_pose, {}, NavState::Failed});
            finish(Outcome::Failed, planning::to_string(*pr.failure));
            return report;
          }
          nav.transition(NavState::Following, now);
          recovery_replanned = true;
          recovery_start = now;
        }
        rec.recovery = true;
        cmd = local::recovery(in, robot).cmd;
      } else {
        in_recovery = false;
        recovery_replanned = false;
        cmd = step.output.cmd;
      }
    }
    rec.cmd = cmd;
    rec.end_to_end_s = seconds_since(tick_start);
    rec.state = nav.state();
    report.ticks.push_back(rec);

    sim = sim::step_sim(sim, cmd, dt, robot);
    sim.time = static_cast<double>(tick + 1) * dt;
    truth.record(sim.time, sim.robot_pose);
    odometry.apply(sim.robot_twist, dt);
    report.trajectory.push_back({sim.time, sim.robot_pose, cmd, nav.state()});
    if (sim::check_collision(scn.scene, sim.robot_pose, robot)) {
      end_run(Outcome::Collision, NavState::Failed, "collision");
      return report;
    }
  }
}

Scenario random_scenario(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x2545f4914f6cdd1dULL + 0x1234567ULL);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  constexpr double kSize = 7.0;
  constexpr double kWall = 0.1;
  for (int attempt = 0;; ++attempt) {
    Scenario s;
    s.name = "random-" + std::to_string(seed);
    s.seed = seed;
    s.scene.bounds = {0.0, kSize, 0.0, kSize};
    s.scene.boxes.push_back({0.0, kSize, 0.0, kWall, 0.5, true});
    s.scene.boxes.push_back({0.0, kSize, kSize - kWall, kSize, 0.5, true});
    s.scene.boxes.push_back({0.0, kWall, 0.0, kSize, 0.5, true});
    s.scene.boxes.push_back({kSize - kWall, kSize, 0.0, kSize, 0.5, true});
    s.start = {uni(0.8, 1.4), uni(1.0, kSize - 1.0), uni(-0.6, 0.6)};
    s.goal = {uni(kSize - 1.4, kSize - 0.8), uni(1.0, kSize - 1.0)};

    const int n_obstacles = std::uniform_int_distribution<int>(4, 7)(rng);
    const int n_unmapped = std::uniform_int_distribution<int>(0, 2)(rng);
    int placed = 0;
    for (int tries = 0; placed < n_obstacles && tries < 200; ++tries) {
      const double cx = uni(2.0, kSize - 2.0);
      const double cy = uni(0.8, kSize - 0.8);
      const double height = uni(0.15, 0.6);
      const bool mapped = placed >= n_unmapped;
      const bool is_box = uni(0.0, 1.0) < 0.5;
      double reach = 0.0;
      if (is_box) {
        const double hx = 0.5 * uni(0.3, 0.8);
        const double hy = 0.5 * uni(0.3, 0.8);
        reach = std::hypot(hx, hy);
        if (std::hypot(cx - s.start.x, cy - s.start.y) < reach + 0.7) continue;
        if (std::hypot(cx - s.goal.x, cy - s.goal.y) < reach + 0.7) continue;
        s.scene.boxes.push_back({cx - hx, cx + hx, cy - hy, cy + hy, height, mapped});
      } else {
        reach = uni(0.1, 0.3);
        if (std::hypot(cx - s.start.x, cy - s.start.y) < reach + 0.7) continue;
        if (std::hypot(cx - s.goal.x, cy - s.goal.y) < reach + 0.7) continue;
        s.scene.cylinders.push_back({cx, cy, reach, height, mapped});
      }
      ++placed;
    }

    // Solvable with a comfortable margin on the full obstacle map.
    RobotParams wide = s.robot;
    wide.radius = 0.3;
    const mapping::OccupancyGrid full = build_prior_map(s, true);
    const PlanResult pr = plan_waypoints(full, wide, 0.45, s.start, s.goal, false);
    if (!pr.failure) return s;
    if (attempt > 100) throw ValidationError("could not generate a solvable scenario");
  }
}

learn::Dataset collect_dataset(const std::vector<Scenario>& scenarios, const PipelineConfig& cfg,
                               std::uint64_t seed) {
  std::vector<std::vector<learn::Sample>> per_scenario(scenarios.size());
  auto worker = [&](std::size_t i) {
    Scenario scn = scenarios[i];
    scn.seed ^= seed;
    local::RulePolicy expert(cfg.dw, scn.robot);
    auto& out = per_scenario[i];
    run_navigation(scn, cfg, expert, [&](const local::PolicyInput& in, const local::PolicyStep& step) {
      if (step.all_blocked || step.output.done) return;
      out.push_back({learn::extract_features(in, scn.robot), step.output.cmd});
    });
  };
  const std::size_t n_threads =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), scenarios.size()));
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < scenarios.size(); i = next++) {
        try {
          worker(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  learn::Dataset data;
  data.seed = seed;
  for (auto& v : per_scenario) data.samples.insert(data.samples.end(), v.begin(), v.end());
  return data;
}

std::string trajectory_csv(const RunReport& r) {
  std::string out = "time,x,y,theta,v,omega,state\n";
  char buf[256];
  for (const auto& p : r.trajectory) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%s\n", p.time, p.pose.x, p.pose.y, p.pose.theta,
                  p.twist.v, p.twist.omega, to_string(p.state));
    out += buf;
  }
  return out;
}

std::string ticks_csv(const RunReport& r) {
  std::string out =
      "tick,time,render_s,segment_s,project_s,policy_s,end_to_end_s,v,omega,perception_age,watchdog,recovery,state\n";
  char buf[320];
  for (const auto& t : r.ticks) {
    std::snprintf(buf, sizeof buf, "%lld,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d,%d,%s\n",
                  static_cast<long long>(t.tick), t.time, t.render_s, t.segment_s, t.project_s, t.policy_s,
                  t.end_to_end_s, t.cmd.v, t.cmd.omega, t.perception_age, t.watchdog ? 1 : 0, t.recovery ? 1 : 0,
                  to_string(t.state));
    out += buf;
  }
  return out;
}

std::string decisions_csv(const RunReport& r) {
  std::string out = "time,v,omega,score,n_feasible,done\n";
  char buf[200];
  for (const auto& d : r.decisions) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%d,%d\n", d.time, d.cmd.v, d.cmd.omega, d.score,
                  d.n_feasible, d.done ? 1 : 0);
    out += buf;
  }
  return out;
}

}  // namespace groundnav::runtime
