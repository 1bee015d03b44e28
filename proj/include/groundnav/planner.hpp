#pragma once

#include <limits>
#include <string>
#include <vector>

#include "groundnav/core.hpp"
#include "groundnav/errors.hpp"
#include "groundnav/mapping.hpp"

namespace groundnav::planning {

inline constexpr double kLethal = std::numeric_limits<double>::infinity();
/// Weight of the soft inflation cost in the step cost.
inline constexpr double kSoftCostWeight = 4.0;

/// Per-cell traversal cost in [0, 1], or kLethal.
class Costmap {
 public:
  Costmap() = default;
  Costmap(const GridGeometry& geometry, std::vector<double> costs, double inflation_radius = 0.0);

  const GridGeometry& geometry() const { return geometry_; }
  double cost(Cell c) const { return costs_[geometry_.index(c)]; }
  bool lethal(Cell c) const { return cost(c) == kLethal; }
  double inflation_radius() const { return inflation_radius_; }
  const std::vector<double>& costs() const { return costs_; }

 private:
  GridGeometry geometry_;
  std::vector<double> costs_;
  double inflation_radius_ = 0.0;
};

/// Occupied and unknown cells are obstacle sources. Cells whose center lies
/// within params.radius of a source center are lethal; the soft cost falls
/// linearly from 1 at that boundary to 0 at inflation_radius.
Costmap inflate(const mapping::OccupancyGrid& grid, const RobotParams& params,
                double inflation_radius);

struct Path {
  std::vector<Cell> cells;
  double total_cost = 0.0;
};

enum class PlanFailure { StartInvalid, GoalInvalid, NoPath };

class PlanningError : public Error {
 public:
  PlanningError(PlanFailure kind, const std::string& what) : Error(what), kind_(kind) {}
  PlanFailure kind() const { return kind_; }

 private:
  PlanFailure kind_;
};

const char* to_string(PlanFailure f);

/// True for an 8-neighbor move the planner may take: both cells non-lethal and,
/// for diagonals, neither orthogonal cell lethal.
bool move_allowed(const Costmap& cm, Cell from, Cell to);

/// Cost of moving between 8-adjacent cells in cell units:
/// step * (1 + w * (c_from + c_to) / 2), step in {1, sqrt(2)}.
double step_cost(const Costmap& cm, Cell from, Cell to);

/// Octile distance in cell units.
double octile_distance(Cell a, Cell b);

/// 8-connected A* with the octile heuristic. Ties on f are broken by lower h,
/// then by lower row-major index. Throws PlanningError.
Path plan(const Costmap& cm, Cell start, Cell goal);

/// Every cell touched by the segment between two cell centers, in order.
/// Where the segment passes exactly through a cell corner both side cells are
/// included.
std::vector<Cell> supercover(Cell a, Cell b);

bool line_of_sight(const Costmap& cm, Cell a, Cell b);

/// Greedy line-of-sight pruning; endpoints are always kept.
std::vector<Cell> shortcut(const Path& path, const Costmap& cm);

/// CSV with header `col,row,x,y`.
std::string cells_csv(const GridGeometry& g, const std::vector<Cell>& cells);
/// Occupancy raster with path cells drawn at 128 and waypoints at 64.
std::string overlay_pgm(const mapping::OccupancyGrid& grid, const std::vector<Cell>& path,
                        const std::vector<Cell>& waypoints);

}  // namespace groundnav::planning
