#pragma once

#include <memory>
#include <string>
#include <vector>

#include "groundnav/core.hpp"
#include "groundnav/groundseg.hpp"

namespace groundnav::local {

/// A point in the robot frame, in polar form.
struct PolarTarget {
  double distance = 0.0;
  double bearing = 0.0;  // (-pi, pi], 0 = straight ahead, positive = left
};

struct PolicyInput {
  std::shared_ptr<const seg::TraversabilityMap> tmap;
  Twist current;
  PolarTarget target;
  double goal_distance = 0.0;
};

struct PolicyOutput {
  Twist cmd;
  bool done = false;
};

struct DWParams {
  int n_v = 5;
  int n_omega = 21;
  double horizon = 1.5;      // s
  double rollout_dt = 0.1;   // s
  double w_heading = 0.6;
  double w_clearance = 0.25;
  double w_speed = 0.15;
  double goal_tolerance = 0.15;  // m
  double safety_margin = 0.05;   // m, added to the robot radius for rollouts
  double tick_dt = 1.0 / 18.0;   // s, span of the dynamic window
  double clearance_cap = 1.0;    // m
  double clearance_step = 0.025; // m, arc-length sampling of the clearance term

  void validate() const;
};

struct Candidate {
  Twist twist;
  int index = 0;  // i_v * n_omega + i_omega
};

/// Velocities reachable within one tick under the acceleration limits,
/// intersected with [0, v_max] x [-omega_max, omega_max], sampled on an
/// n_v x n_omega lattice.
std::vector<Candidate> candidate_lattice(const Twist& current, const DWParams& params,
                                         const RobotParams& robot);

/// Poses at rollout_dt, 2*rollout_dt, ..., horizon along the constant-twist arc
/// from the robot origin.
std::vector<Pose2D> rollout(const Twist& twist, const DWParams& params);

/// True when a disc of `radius` centered at (x, y) overlaps a non-traversable
/// cell or extends past the map edge.
bool disc_blocked(const seg::TraversabilityMap& tmap, double x, double y, double radius);

struct CandidateScore {
  bool feasible = false;
  // Free arc length along the candidate's curvature before the robot disc
  // touches a non-traversable cell, capped; 0 for candidates with v = 0.
  double clearance = 0.0;
  double heading_error = 0.0;
  double score = 0.0;
};

CandidateScore score_candidate(const seg::TraversabilityMap& tmap, const Candidate& c,
                               const PolarTarget& target, const DWParams& params,
                               const RobotParams& robot);

struct RuleDecision {
  PolicyOutput output;
  bool all_blocked = false;
  double score = 0.0;
  int n_feasible = 0;
  int chosen_index = -1;
};

/// Dynamic-window arc policy. `all_blocked` is set (with a zero command) when
/// no candidate is feasible.
RuleDecision rule_policy(const PolicyInput& in, const DWParams& params, const RobotParams& robot);

/// Rotate in place toward the 30-degree sector with the most traversable cells
/// at half the angular speed limit.
PolicyOutput recovery(const PolicyInput& in, const RobotParams& robot);

struct WaypointTarget {
  PolarTarget target;
  double goal_distance = 0.0;
  std::size_t active = 0;
};

class WaypointManager {
 public:
  WaypointManager() = default;
  explicit WaypointManager(std::vector<Point2> waypoints, double lookahead = 0.6);

  /// Advances past waypoints within lookahead and returns the active one in the robot frame.
  WaypointTarget update(const Pose2D& pose);
  const std::vector<Point2>& waypoints() const { return waypoints_; }
  std::size_t active() const { return active_; }

 private:
  std::vector<Point2> waypoints_;
  double lookahead_ = 0.6;
  std::size_t active_ = 0;
};

/// Result of one control tick.
struct PolicyStep {
  PolicyOutput output;
  bool all_blocked = false;
  double score = 0.0;
  int n_feasible = 0;
};

/// Shared interface of the rule-based and the learned navigation policies.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual PolicyStep act(const PolicyInput& in) = 0;
  virtual std::string name() const = 0;
};

class RulePolicy : public Policy {
 public:
  RulePolicy(DWParams params, RobotParams robot) : params_(params), robot_(robot) {}
  PolicyStep act(const PolicyInput& in) override;
  std::string name() const override { return "rule"; }

 private:
  DWParams params_;
  RobotParams robot_;
};

}  // namespace groundnav::local
