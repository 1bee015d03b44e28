#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. They are deliberately naive (brute force, textbook formulas) and do
// not call the library code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <vector>

#include "groundnav/core.hpp"
#include "groundnav/groundseg.hpp"
#include "groundnav/local_planner.hpp"
#include "groundnav/planner.hpp"

namespace oracle {

using namespace groundnav;

// ---- camera / floor --------------------------------------------------------

/// Depth of the floor seen at pixel (u, v), by intersecting the pixel ray with
/// the plane z = 0. The ray is built from the camera basis vectors.
inline std::optional<double> floor_depth(const CameraModel& cam, double u, double v) {
  const double p = cam.pitch;
  // Robot-frame unit vectors of the camera axes (x right, y down, z forward).
  const double fwd[3] = {std::cos(p), 0.0, -std::sin(p)};
  const double down[3] = {-std::sin(p), 0.0, -std::cos(p)};
  const double right[3] = {0.0, -1.0, 0.0};
  const double a = (u - cam.cx) / cam.fx;
  const double b = (v - cam.cy) / cam.fy;
  double dir[3];
  for (int i = 0; i < 3; ++i) dir[i] = fwd[i] + a * right[i] + b * down[i];
  if (!(dir[2] < 0.0)) return std::nullopt;
  return cam.mount_height / -dir[2];  // optical-axis component of dir is 1
}

// ---- inflation -------------------------------------------------------------

/// Cost per cell from the distance to every obstacle source (all cells not
/// strictly free), checking every source.
inline std::vector<double> brute_force_inflation(const GridGeometry& g, const std::vector<bool>& source,
                                                 double radius, double inflation) {
  std::vector<double> cost(g.size(), 0.0);
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      double best = std::numeric_limits<double>::infinity();
      for (int sr = 0; sr < g.rows; ++sr) {
        for (int sc = 0; sc < g.cols; ++sc) {
          if (!source[static_cast<std::size_t>(sr) * g.cols + sc]) continue;
          best = std::min(best, std::hypot(double(c - sc), double(r - sr)) * g.resolution);
        }
      }
      double& out = cost[static_cast<std::size_t>(r) * g.cols + c];
      if (best <= radius + 1e-9) {
        out = std::numeric_limits<double>::infinity();
      } else if (best < inflation) {
        out = 1.0 - (best - radius) / (inflation - radius);
      }
    }
  }
  return cost;
}

// ---- shortest paths --------------------------------------------------------

/// Dijkstra over raw per-cell costs (inf = lethal) with the same move model as
/// the planner: 8 neighbors, no corner cutting past lethal cells, step cost
/// step * (1 + w * mean(cost)). Returns inf when the goal is unreachable.
inline double dijkstra(int cols, int rows, const std::vector<double>& cost, Cell start, Cell goal,
                       double weight = 4.0) {
  auto idx = [cols](int c, int r) { return static_cast<std::size_t>(r) * cols + c; };
  auto lethal = [&](int c, int r) { return std::isinf(cost[idx(c, r)]); };
  const double inf = std::numeric_limits<double>::infinity();
  if (lethal(start.col, start.row) || lethal(goal.col, goal.row)) return inf;
  std::vector<double> dist(cost.size(), inf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[idx(start.col, start.row)] = 0.0;
  open.push({0.0, idx(start.col, start.row)});
  while (!open.empty()) {
    const auto [d, i] = open.top();
    open.pop();
    if (d > dist[i]) continue;
    const int c = static_cast<int>(i % cols);
    const int r = static_cast<int>(i / cols);
    if (c == goal.col && r == goal.row) return d;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dc == 0 && dr == 0) continue;
        const int nc = c + dc;
        const int nr = r + dr;
        if (nc < 0 || nr < 0 || nc >= cols || nr >= rows || lethal(nc, nr)) continue;
        if (dc != 0 && dr != 0 && (lethal(nc, r) || lethal(c, nr))) continue;
        const double step = (dc != 0 && dr != 0) ? std::sqrt(2.0) : 1.0;
        const double nd = d + step * (1.0 + weight * (cost[i] + cost[idx(nc, nr)]) / 2.0);
        if (nd < dist[idx(nc, nr)]) {
          dist[idx(nc, nr)] = nd;
          open.push({nd, idx(nc, nr)});
        }
      }
    }
  }
  return inf;
}

// ---- supercover ------------------------------------------------------------

/// Cells whose closed square meets the segment between two cell centers.
/// Works in doubled coordinates so every quantity is an exact integer.
inline std::set<Cell> segment_cells(Cell a, Cell b) {
  const long ax = 2L * a.col + 1, ay = 2L * a.row + 1;
  const long bx = 2L * b.col + 1, by = 2L * b.row + 1;
  std::set<Cell> out;
  for (int c = std::min(a.col, b.col) - 1; c <= std::max(a.col, b.col) + 1; ++c) {
    for (int r = std::min(a.row, b.row) - 1; r <= std::max(a.row, b.row) + 1; ++r) {
      const long x0 = 2L * c, x1 = 2L * c + 2, y0 = 2L * r, y1 = 2L * r + 2;
      if (std::max(ax, bx) < x0 || std::min(ax, bx) > x1 || std::max(ay, by) < y0 || std::min(ay, by) > y1) {
        continue;
      }
      // The box meets the line unless all four corners lie strictly on one side.
      int pos = 0, neg = 0;
      for (const long cx : {x0, x1}) {
        for (const long cy : {y0, y1}) {
          const long s = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
          if (s > 0) ++pos;
          if (s < 0) ++neg;
        }
      }
      if (pos == 4 || neg == 4) continue;
      out.insert({c, r});
    }
  }
  return out;
}

// ---- dynamic window --------------------------------------------------------

/// Closed-form constant-twist arc from the origin.
inline Pose2D arc(double v, double w, double t) {
  if (std::abs(w) < 1e-6) return {v * t, 0.0, 0.0};
  return {v / w * std::sin(w * t), v / w * (1.0 - std::cos(w * t)), normalize_angle(w * t)};
}

/// Disc of radius `rad` at (x, y) meets (open test) a cell that is off the map
/// or not traversable. Checks every cell of a generous bounding box.
inline bool disc_hits(const seg::TraversabilityMap& m, double x, double y, double rad) {
  const GridGeometry& g = m.geometry;
  const double res = g.resolution;
  const int c0 = static_cast<int>(std::floor((x - rad - g.origin.x) / res)) - 1;
  const int c1 = static_cast<int>(std::floor((x + rad - g.origin.x) / res)) + 1;
  const int r0 = static_cast<int>(std::floor((y - rad - g.origin.y) / res)) - 1;
  const int r1 = static_cast<int>(std::floor((y + rad - g.origin.y) / res)) + 1;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      const double xl = g.origin.x + c * res, xh = xl + res;
      const double yl = g.origin.y + r * res, yh = yl + res;
      const double nx = std::clamp(x, xl, xh);
      const double ny = std::clamp(y, yl, yh);
      if ((nx - x) * (nx - x) + (ny - y) * (ny - y) >= rad * rad) continue;
      const bool inside = c >= 0 && r >= 0 && c < g.cols && r < g.rows;
      if (!inside || m.cells[static_cast<std::size_t>(r) * g.cols + c] != seg::CellState::Traversable) return true;
    }
  }
  return false;
}

struct DwaChoice {
  bool blocked = true;
  int index = -1;
  double v = 0.0;
  double omega = 0.0;
};

/// Scores the whole velocity lattice and returns the best candidate: highest
/// score, then smallest |omega|, then lowest lattice index.
inline DwaChoice brute_force_dwa(const local::PolicyInput& in, const local::DWParams& p, const RobotParams& robot) {
  const double vlo = std::max(0.0, in.current.v - robot.a_max * p.tick_dt);
  const double vhi = std::min(robot.v_max, std::max(0.0, in.current.v + robot.a_max * p.tick_dt));
  const double wlo = std::max(-robot.omega_max, in.current.omega - robot.alpha_max * p.tick_dt);
  const double whi = std::min(robot.omega_max, std::max(-robot.omega_max, in.current.omega + robot.alpha_max * p.tick_dt));
  const double lo_v = std::min(vlo, vhi);
  const double lo_w = std::min(wlo, whi);
  auto sample = [](double lo, double hi, int i, int n) { return n == 1 ? (lo + hi) / 2 : lo + (hi - lo) * i / (n - 1); };
  const int steps = static_cast<int>(std::lround(p.horizon / p.rollout_dt));

  struct Scored {
    double score;
    double omega;
    int index;
    double v;
  };
  std::vector<Scored> feasible;
  for (int iv = 0; iv < p.n_v; ++iv) {
    for (int iw = 0; iw < p.n_omega; ++iw) {
      const double v = sample(lo_v, vhi, iv, p.n_v);
      const double w = sample(lo_w, whi, iw, p.n_omega);
      bool ok = true;
      Pose2D end;
      for (int k = 1; k <= steps && ok; ++k) {
        end = arc(v, w, k * p.rollout_dt);
        ok = !disc_hits(*in.tmap, end.x, end.y, robot.radius + p.safety_margin);
      }
      if (!ok) continue;
      double clearance = 0.0;
      if (v > 0.0) {
        clearance = p.clearance_cap;
        const int n = static_cast<int>(std::floor(p.clearance_cap / p.clearance_step + 1e-9));
        for (int k = 1; k <= n; ++k) {
          const Pose2D q = arc(1.0, w / v, k * p.clearance_step);
          if (disc_hits(*in.tmap, q.x, q.y, robot.radius)) {
            clearance = (k - 1) * p.clearance_step;
            break;
          }
        }
      }
      const double tx = in.target.distance * std::cos(in.target.bearing);
      const double ty = in.target.distance * std::sin(in.target.bearing);
      double err = std::atan2(ty - end.y, tx - end.x) - end.theta;
      while (err > kPi) err -= 2 * kPi;
      while (err <= -kPi) err += 2 * kPi;
      const double score = p.w_heading * (1.0 - std::abs(err) / kPi) + p.w_clearance * clearance / p.clearance_cap +
                           p.w_speed * v / robot.v_max;
      feasible.push_back({score, w, iv * p.n_omega + iw, v});
    }
  }
  DwaChoice out;
  if (feasible.empty()) return out;
  double best = -1e300;
  for (const auto& s : feasible) best = std::max(best, s.score);
  const Scored* pick = nullptr;
  for (const auto& s : feasible) {
    if (s.score < best - 1e-12) continue;
    if (pick == nullptr || std::abs(s.omega) < std::abs(pick->omega) - 1e-12) pick = &s;
  }
  out.blocked = false;
  out.index = pick->index;
  out.v = pick->v;
  out.omega = pick->omega;
  return out;
}

// ---- random inputs ---------------------------------------------------------

/// Random robot-centric map: mostly traversable with blobs of obstacle and
/// unknown cells, keeping the robot's own footprint clear.
inline seg::TraversabilityMap random_tmap(std::mt19937_64& rng, double keep_clear = 0.25) {
  seg::SegParams sp;
  seg::TraversabilityMap m = seg::make_traversability_map(sp);
  std::fill(m.cells.begin(), m.cells.end(), seg::CellState::Traversable);
  const GridGeometry& g = m.geometry;
  std::uniform_int_distribution<int> nblobs(2, 12);
  std::uniform_real_distribution<double> ux(-0.5, 3.0), uy(-2.0, 2.0), ur(0.05, 0.5), u01(0.0, 1.0);
  const int n = nblobs(rng);
  for (int k = 0; k < n; ++k) {
    const double cx = ux(rng), cy = uy(rng), rad = ur(rng);
    const auto state = u01(rng) < 0.75 ? seg::CellState::Obstacle : seg::CellState::Unknown;
    for (std::size_t i = 0; i < m.cells.size(); ++i) {
      const Point2 p = grid_to_world(g, g.cell_at(i));
      if (std::hypot(p.x - cx, p.y - cy) < rad && std::hypot(p.x, p.y) > keep_clear) m.cells[i] = state;
    }
  }
  return m;
}

}  // namespace oracle
