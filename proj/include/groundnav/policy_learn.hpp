#pragma once

// Learned navigation policy: a small tanh MLP cloned from the rule-based
// expert. Inputs are compact sector-clearance features of the traversability
// map plus goal and velocity terms; outputs pass through bounded heads so the
// command always respects the robot's speed limits.

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "groundnav/core.hpp"
#include "groundnav/errors.hpp"
#include "groundnav/local_planner.hpp"

namespace groundnav::learn {

inline constexpr int kSectorCount = 16;
inline constexpr int kFeatureSize = kSectorCount + 5;
inline constexpr double kGoalDistanceClip = 3.0;

/// [0,16): nearest non-traversable cell range per pi/16 sector over
/// [-pi/2, pi/2), divided by the map half-extent, 1.0 when the sector is clear;
/// then clipped goal distance / 3 m, sin(bearing), cos(bearing), v/v_max,
/// omega/omega_max.
using FeatureVector = std::array<double, kFeatureSize>;

FeatureVector extract_features(const local::PolicyInput& in, const RobotParams& robot);

/// Fully connected network with tanh hidden layers. The two outputs go through
/// a logistic head (forward speed in [0, 1]) and a tanh head (turn rate in
/// [-1, 1]), both as fractions of the robot's limits.
class Mlp {
 public:
  Mlp() = default;
  /// Zero-initialized network with the given layer sizes (input first).
  explicit Mlp(std::vector<int> sizes);
  /// Uniform init in +-sqrt(6 / (fan_in + fan_out)) per weight matrix; zero biases.
  static Mlp xavier(std::vector<int> sizes, std::uint64_t seed);
  /// The navigation policy shape 21-32-32-2.
  static std::vector<int> policy_shape() { return {kFeatureSize, 32, 32, 2}; }

  const std::vector<int>& sizes() const { return sizes_; }
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::size_t layer_count() const { return sizes_.size() - 1; }
  /// Offsets of layer l's weights (out x in, row-major) and biases in parameters().
  std::size_t weight_offset(std::size_t l) const { return offsets_[l]; }
  std::size_t bias_offset(std::size_t l) const {
    return offsets_[l] + static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1];
  }

  /// Normalized outputs (v / v_max, omega / omega_max). Throws DimensionMismatch.
  std::array<double, 2> forward(std::span<const double> x) const;
  Twist command(std::span<const double> x, const RobotParams& robot) const;

  /// Loss 0.5 * sum_k (y_k - target_k)^2 for one sample; accumulates
  /// scale * dLoss/dparams into grad (same layout as parameters()).
  double loss_and_gradient(std::span<const double> x, std::span<const double> target,
                           std::span<double> grad, double scale = 1.0) const;
  double loss(std::span<const double> x, std::span<const double> target) const;

 private:
  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

/// Versioned text format: `MLPW 1 <n_sizes> <sizes...>` then one parameter per
/// line (layer-major; weights row-major, then biases) with 9 significant digits.
std::string encode_weights(const Mlp& net);
/// Throws ParseError with a format diagnostic.
Mlp decode_weights(const std::string& text);
void save_weights(const Mlp& net, const std::filesystem::path& path);
Mlp load_weights(const std::filesystem::path& path);

struct Sample {
  FeatureVector features{};
  Twist expert;
};

struct Dataset {
  std::vector<Sample> samples;
  std::uint64_t seed = 0;
};

struct TrainParams {
  double learning_rate = 1e-3;
  int batch_size = 64;
  int epochs = 50;
  double momentum = 0.9;
  std::uint64_t seed = 0;
};

struct TrainResult {
  Mlp net;
  std::vector<double> loss_curve;  // mean per-sample loss of each epoch
};

class NonFiniteLoss : public Error {
 public:
  using Error::Error;
};

/// Mini-batch SGD with momentum on the normalized-command MSE.
TrainResult train(const Dataset& data, const RobotParams& robot, const TrainParams& params);

/// Max relative error between backpropagated and central-difference gradients
/// of the single-sample loss over every parameter (h = 1e-5, denominators
/// floored at 1e-8).
double grad_check(const Mlp& net, std::span<const double> x, std::span<const double> target);

class LearnedPolicy : public local::Policy {
 public:
  LearnedPolicy(Mlp net, RobotParams robot, double goal_tolerance = 0.15)
      : net_(std::move(net)), robot_(robot), goal_tolerance_(goal_tolerance) {}
  local::PolicyStep act(const local::PolicyInput& in) override;
  std::string name() const override { return "learned"; }

 private:
  Mlp net_;
  RobotParams robot_;
  double goal_tolerance_;
};

}  // namespace groundnav::learn
