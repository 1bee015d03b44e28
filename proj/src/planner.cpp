#include "groundnav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <tuple>

#include "groundnav/pnm.hpp"

namespace groundnav::planning {

Costmap::Costmap(const GridGeometry& geometry, std::vector<double> costs, double inflation_radius)
    : geometry_(geometry), costs_(std::move(costs)), inflation_radius_(inflation_radius) {
  if (costs_.size() != geometry_.size()) throw DimensionMismatch("costmap size mismatch");
}

Costmap inflate(const mapping::OccupancyGrid& grid, const RobotParams& params,
                double inflation_radius) {
  const GridGeometry& g = grid.geometry();
  if (!(inflation_radius >= params.radius)) {
    throw ValidationError("inflation radius must be at least the robot radius");
  }
  const std::size_t n = g.size();
  std::vector<char> source(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    source[i] = grid.occupancy(g.cell_at(i)) != mapping::Occupancy::Free ? 1 : 0;
  }

  constexpr double kEps = 1e-9;
  const int reach = static_cast<int>(std::floor(inflation_radius / g.resolution + kEps));
  std::vector<std::pair<int, int>> kernel;
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      if (dc * dc + dr * dr <= reach * reach) kernel.emplace_back(dc, dr);
    }
  }

  // Only sources with a non-source 4-neighbor can be the nearest source of a free cell.
  constexpr int kFar = std::numeric_limits<int>::max();
  std::vector<int> dist2(n, kFar);
  for (std::size_t i = 0; i < n; ++i) {
    if (!source[i]) continue;
    dist2[i] = 0;
    const Cell c = g.cell_at(i);
    bool boundary = false;
    for (const auto& [dc, dr] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      const Cell nb{c.col + dc, c.row + dr};
      if (g.contains(nb) && !source[g.index(nb)]) boundary = true;
    }
    if (!boundary) continue;
    for (const auto& [dc, dr] : kernel) {
      const Cell nb{c.col + dc, c.row + dr};
      if (!g.contains(nb)) continue;
      int& d = dist2[g.index(nb)];
      d = std::min(d, dc * dc + dr * dr);
    }
  }

  std::vector<double> costs(n, 0.0);
  const double band = inflation_radius - params.radius;
  for (std::size_t i = 0; i < n; ++i) {
    if (dist2[i] == kFar) continue;
    const double d = std::sqrt(static_cast<double>(dist2[i])) * g.resolution;
    if (d <= params.radius + kEps) {
      costs[i] = kLethal;
    } else if (band > 0.0 && d < inflation_radius) {
      costs[i] = 1.0 - (d - params.radius) / band;
    }
  }
  return Costmap(g, std::move(costs), inflation_radius);
}

const char* to_string(PlanFailure f) {
  switch (f) {
    case PlanFailure::StartInvalid: return "StartInvalid";
    case PlanFailure::GoalInvalid: return "GoalInvalid";
    case PlanFailure::NoPath: return "NoPath";
  }
  return "?";
}

bool move_allowed(const Costmap& cm, Cell from, Cell to) {
  const GridGeometry& g = cm.geometry();
  if (!g.contains(to) || cm.lethal(to) || cm.lethal(from)) return false;
  if (from.col != to.col && from.row != to.row) {
    if (cm.lethal({to.col, from.row}) || cm.lethal({from.col, to.row})) return false;
  }
  return true;
}

double step_cost(const Costmap& cm, Cell from, Cell to) {
  const double step = (from.col != to.col && from.row != to.row) ? std::sqrt(2.0) : 1.0;
  return step * (1.0 + kSoftCostWeight * (cm.cost(from) + cm.cost(to)) / 2.0);
}

double octile_distance(Cell a, Cell b) {
  const int dx = std::abs(a.col - b.col);
  const int dy = std::abs(a.row - b.row);
  return std::abs(dx - dy) + std::sqrt(2.0) * std::min(dx, dy);
}

Path plan(const Costmap& cm, Cell start, Cell goal) {
  const GridGeometry& g = cm.geometry();
  if (!g.contains(start) || cm.lethal(start)) {
    throw PlanningError(PlanFailure::StartInvalid, "start cell is off the map or lethal");
  }
  if (!g.contains(goal) || cm.lethal(goal)) {
    throw PlanningError(PlanFailure::GoalInvalid, "goal cell is off the map or lethal");
  }

  const std::size_t n = g.size();
  std::vector<double> cost_so_far(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, n);
  std::vector<char> closed(n, 0);
  using Entry = std::tuple<double, double, std::size_t>;  // f, h, index
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  const std::size_t s = g.index(start);
  const std::size_t t = g.index(goal);
  cost_so_far[s] = 0.0;
  const double h0 = octile_distance(start, goal);
  open.emplace(h0, h0, s);

  while (!open.empty()) {
    const auto [f, h, idx] = open.top();
    open.pop();
    if (closed[idx]) continue;
    closed[idx] = 1;
    if (idx == t) break;
    const Cell c = g.cell_at(idx);
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dc == 0 && dr == 0) continue;
        const Cell nb{c.col + dc, c.row + dr};
        if (!move_allowed(cm, c, nb)) continue;
        const std::size_t ni = g.index(nb);
        if (closed[ni]) continue;
        const double candidate = cost_so_far[idx] + step_cost(cm, c, nb);
        if (candidate < cost_so_far[ni]) {
          cost_so_far[ni] = candidate;
          parent[ni] = idx;
          const double hn = octile_distance(nb, goal);
          open.emplace(candidate + hn, hn, ni);
        }
      }
    }
  }
  if (!closed[t]) throw PlanningError(PlanFailure::NoPath, "goal is unreachable");

  Path path;
  for (std::size_t i = t; i != n; i = parent[i]) path.cells.push_back(g.cell_at(i));
  std::reverse(path.cells.begin(), path.cells.end());
  for (std::size_t i = 1; i < path.cells.size(); ++i) {
    path.total_cost += step_cost(cm, path.cells[i - 1], path.cells[i]);
  }
  return path;
}

std::vector<Cell> supercover(Cell a, Cell b) {
  const int nx = std::abs(b.col - a.col);
  const int ny = std::abs(b.row - a.row);
  const int sx = b.col > a.col ? 1 : -1;
  const int sy = b.row > a.row ? 1 : -1;
  std::vector<Cell> out;
  out.reserve(static_cast<std::size_t>(nx + ny + 1));
  Cell c = a;
  out.push_back(c);
  int ix = 0;
  int iy = 0;
  // The k-th vertical boundary is crossed at t = (2k+1)/(2nx), the k-th
  // horizontal one at (2k+1)/(2ny); compare them exactly in integers.
  while (ix < nx || iy < ny) {
    long long cmp = 0;
    if (ix < nx && iy < ny) {
      cmp = static_cast<long long>(2 * ix + 1) * ny - static_cast<long long>(2 * iy + 1) * nx;
    }
    if (iy == ny || (ix < nx && cmp < 0)) {
      c.col += sx;
      ++ix;
    } else if (ix == nx || cmp > 0) {
      c.row += sy;
      ++iy;
    } else {
      out.push_back({c.col + sx, c.row});
      out.push_back({c.col, c.row + sy});
      c.col += sx;
      c.row += sy;
      ++ix;
      ++iy;
    }
    out.push_back(c);
  }
  return out;
}

bool line_of_sight(const Costmap& cm, Cell a, Cell b) {
  const GridGeometry& g = cm.geometry();
  for (const Cell c : supercover(a, b)) {
    if (!g.contains(c) || cm.lethal(c)) return false;
  }
  return true;
}

std::vector<Cell> shortcut(const Path& path, const Costmap& cm) {
  std::vector<Cell> out;
  if (path.cells.empty()) return out;
  std::size_t anchor = 0;
  out.push_back(path.cells.front());
  while (anchor + 1 < path.cells.size()) {
    std::size_t next = anchor + 1;
    for (std::size_t j = path.cells.size() - 1; j > anchor + 1; --j) {
      if (line_of_sight(cm, path.cells[anchor], path.cells[j])) {
        next = j;
        break;
      }
    }
    out.push_back(path.cells[next]);
    anchor = next;
  }
  return out;
}

std::string cells_csv(const GridGeometry& g, const std::vector<Cell>& cells) {
  std::string out = "col,row,x,y\n";
  char buf[128];
  for (const Cell c : cells) {
    const Point2 p = grid_to_world(g, c);
    std::snprintf(buf, sizeof buf, "%d,%d,%.6f,%.6f\n", c.col, c.row, p.x, p.y);
    out += buf;
  }
  return out;
}

std::string overlay_pgm(const mapping::OccupancyGrid& grid, const std::vector<Cell>& path,
                        const std::vector<Cell>& waypoints) {
  pnm::Gray8 img = pnm::decode_pgm(mapping::encode_map_pgm(grid));
  const GridGeometry& g = grid.geometry();
  auto paint = [&](Cell c, std::uint8_t value) {
    if (!g.contains(c)) return;
    img.pixels[static_cast<std::size_t>(g.rows - 1 - c.row) * g.cols + c.col] = value;
  };
  for (const Cell c : path) paint(c, 128);
  for (const Cell c : waypoints) paint(c, 64);
  return pnm::encode_pgm(img);
}

}  // namespace groundnav::planning
