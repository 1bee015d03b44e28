#include <algorithm>
#include <numeric>
#include <random>

#include "groundnav/policy_learn.hpp"

namespace groundnav::learn {

TrainResult train(const Dataset& data, const RobotParams& robot, const TrainParams& params) {
  if (data.samples.empty()) throw ValidationError("training dataset is empty");
  if (params.batch_size < 1 || params.epochs < 0 || !(params.learning_rate > 0.0)) {
    throw ValidationError("invalid training hyper-parameters");
  }
  TrainResult result{Mlp::xavier(Mlp::policy_shape(), params.seed), {}};
  Mlp& net = result.net;
  auto weights = net.parameters();
  std::vector<double> grad(weights.size());
  std::vector<double> velocity(weights.size(), 0.0);

  std::vector<std::array<double, 2>> targets;
  targets.reserve(data.samples.size());
  for (const Sample& s : data.samples) {
    targets.push_back({s.expert.v / robot.v_max, s.expert.omega / robot.omega_max});
  }

  std::vector<std::size_t> order(data.samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(params.seed ^ 0x9e3779b97f4a7c15ULL);
  const std::size_t batch = static_cast<std::size_t>(params.batch_size);

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const double scale = 1.0 / static_cast<double>(end - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        batch_loss += net.loss_and_gradient(data.samples[i].features, targets[i], grad, scale);
      }
      if (!std::isfinite(batch_loss)) {
        throw NonFiniteLoss("non-finite loss at epoch " + std::to_string(epoch) + ", batch starting at sample " +
                            std::to_string(start) + " (learning rate " + std::to_string(params.learning_rate) +
                            ")");
      }
      epoch_loss += batch_loss;
      for (std::size_t p = 0; p < weights.size(); ++p) {
        velocity[p] = params.momentum * velocity[p] - params.learning_rate * grad[p];
        weights[p] += velocity[p];
      }
    }
    result.loss_curve.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  return result;
}

}  // namespace groundnav::learn
