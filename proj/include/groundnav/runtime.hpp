#pragma once

// Closed-loop navigation: a single-threaded scheduler interleaving perception,
// mapping/replanning and control at their own rates in simulated time. Stages
// hand data to each other through latest-wins mailboxes.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "groundnav/groundseg.hpp"
#include "groundnav/local_planner.hpp"
#include "groundnav/mapping.hpp"
#include "groundnav/planner.hpp"
#include "groundnav/policy_learn.hpp"
#include "groundnav/scenario.hpp"

namespace groundnav::runtime {

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

enum class PoseSource { GroundTruth, DeadReckoning };

struct PipelineConfig {
  double control_rate = 18.0;    // Hz
  double replan_rate = 2.0;      // Hz
  double perception_rate = 0.0;  // Hz, 0 = every control tick
  double stale_timeout = 0.25;   // s
  double timeout = 60.0;         // s of simulated time
  double recovery_limit = 3.0;   // s of continuous recovery before replanning
  // Lethal radius of the global costmap; wider than the robot so planned
  // corridors leave room for the local planner's safety margin.
  double planning_radius = 0.30;
  double inflation_radius = 0.60;
  double stall_time = 1.0;  // s of commands without translation that counts as blocked
  double lookahead = 0.6;
  PoseSource pose_source = PoseSource::GroundTruth;
  seg::SegParams seg;
  local::DWParams dw;

  void validate() const;
};

enum class NavState { Idle, Planning, Following, Reached, Failed };
const char* to_string(NavState s);

/// Navigator state machine; rejects illegal transitions with std::logic_error.
class NavStateMachine {
 public:
  struct Transition {
    double time;
    NavState from;
    NavState to;
  };

  static bool legal(NavState from, NavState to);
  NavState state() const { return state_; }
  bool terminal() const { return state_ == NavState::Reached || state_ == NavState::Failed; }
  const std::string& failure_reason() const { return reason_; }
  void transition(NavState to, double time, std::string reason = {});
  const std::vector<Transition>& history() const { return history_; }

 private:
  NavState state_ = NavState::Idle;
  std::string reason_;
  std::vector<Transition> history_;
};

enum class Outcome { Reached, Collision, Timeout, Failed };
const char* to_string(Outcome o);

struct TrajectoryPoint {
  double time = 0.0;
  Pose2D pose;
  Twist twist;  // command issued at this time
  NavState state = NavState::Idle;
};

struct TickRecord {
  std::int64_t tick = 0;
  double time = 0.0;
  double render_s = 0.0;
  double segment_s = 0.0;
  double project_s = 0.0;
  double policy_s = 0.0;
  double end_to_end_s = 0.0;
  Twist cmd;
  double perception_age = 0.0;  // s since the consumed snapshot was captured; inf when none
  bool watchdog = false;
  bool recovery = false;
  NavState state = NavState::Following;
};

struct DecisionRecord {
  double time = 0.0;
  Twist cmd;
  double score = 0.0;
  int n_feasible = 0;
  bool done = false;
};

struct RunReport {
  Outcome outcome = Outcome::Failed;
  std::string reason;
  std::vector<TrajectoryPoint> trajectory;
  std::vector<TickRecord> ticks;
  std::vector<DecisionRecord> decisions;
  std::vector<NavStateMachine::Transition> transitions;
  std::vector<Point2> initial_waypoints;
  int replans = 0;
};

/// Called for every tick on which the policy produced a command from fresh
/// perception (not for watchdog stops).
using DecisionObserver = std::function<void(const local::PolicyInput&, const local::PolicyStep&)>;

/// World-frame occupancy grid over the scene bounds with the mapped obstacles
/// occupied, the rest weakly free and the outermost ring occupied.
mapping::OccupancyGrid build_prior_map(const Scenario& scn, bool include_unmapped = false);

/// Robot-centric map for the policy: cells seen in the latest snapshot keep
/// their state; the rest come from the world map, and still-unknown cells
/// under the robot footprint are treated as traversable.
seg::TraversabilityMap compose_local_map(const seg::TraversabilityMap& snapshot, const Pose2D& capture_pose,
                                         const mapping::OccupancyGrid& world, const Pose2D& pose,
                                         double footprint_radius);

/// Throws ConfigError / ValidationError before anything runs.
RunReport run_navigation(const Scenario& scn, const PipelineConfig& cfg, local::Policy& policy,
                         const DecisionObserver& observer = {});

/// Randomized walled room with a mix of mapped and unmapped obstacles and a
/// start/goal pair that is solvable on the full obstacle map.
Scenario random_scenario(std::uint64_t seed);

/// Rule-expert rollouts on each scenario; keeps (features, command) of every
/// tick where the expert chose a feasible command.
learn::Dataset collect_dataset(const std::vector<Scenario>& scenarios, const PipelineConfig& cfg,
                               std::uint64_t seed);

struct SegAccuracy {
  std::size_t sampled = 0;             // lattice pixels compared
  std::size_t agree = 0;
  std::size_t obstacle_as_ground = 0;  // tall, near obstacle pixels labeled Ground, edges excluded
  double accuracy() const { return sampled == 0 ? 1.0 : static_cast<double>(agree) / sampled; }
};

/// Scores segmentation on the sampling lattice against simulator labels.
/// Ground truth: no hit -> Unknown, floor -> Ground, obstacle surface above
/// the clearance height -> Overhead, any other obstacle surface -> Obstacle.
/// The obstacle->ground count only considers obstacles at least `min_height`
/// tall whose hit lies within `max_range` (horizontal) and skips pixels next
/// to a label or object edge. `truth` must be rendered at full resolution.
SegAccuracy evaluate_segmentation(const seg::PixelClassFrame& pred, const sim::Rendering& truth,
                                  const sim::Scene& scene, const CameraModel& cam, const seg::SegParams& params,
                                  double max_range = 3.0, double min_height = 0.15);

std::string trajectory_csv(const RunReport& r);
std::string ticks_csv(const RunReport& r);
std::string decisions_csv(const RunReport& r);

struct StageStats {
  std::string stage;
  double mean_s = 0.0;
  double p95_s = 0.0;
};

struct BenchReport {
  int n_ticks = 0;
  std::vector<StageStats> stages;  // render, segment, project, policy, chain
  double perception_hz = 0.0;      // segment + project
  double policy_hz = 0.0;
  double chain_hz = 0.0;           // n_ticks / wall time of segment+project+policy
  double render_hz = 0.0;
};

/// Perception->command chain run flat out on frames rendered along a drive
/// through the scenario. Throws ConfigError when n_ticks < 100.
BenchReport bench(const Scenario& scn, const PipelineConfig& cfg, int n_ticks);
std::string bench_csv(const BenchReport& r);

}  // namespace groundnav::runtime
