#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>

#include "groundnav/pnm.hpp"
#include "groundnav/policy_learn.hpp"

namespace groundnav::learn {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Mlp::Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw DimensionMismatch("an MLP needs at least an input and an output layer");
  if (sizes_.back() != 2) throw DimensionMismatch("the policy network must have 2 outputs");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] < 1 || sizes_[l + 1] < 1) throw DimensionMismatch("layer sizes must be positive");
    offsets_.push_back(total);
    total += static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
  }
  params_.assign(total, 0.0);
}

Mlp Mlp::xavier(std::vector<int> sizes, std::uint64_t seed) {
  Mlp net(std::move(sizes));
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const int fan_in = net.sizes_[l];
    const int fan_out = net.sizes_[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    const std::size_t w = net.weight_offset(l);
    for (std::size_t i = 0; i < static_cast<std::size_t>(fan_in) * fan_out; ++i) {
      net.params_[w + i] = dist(rng);
    }
  }
  return net;
}

std::array<double, 2> Mlp::forward(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(sizes_.front())) {
    throw DimensionMismatch("input has " + std::to_string(x.size()) + " features, network expects " +
                            std::to_string(sizes_.front()));
  }
  std::vector<double> act(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    next.assign(static_cast<std::size_t>(out), 0.0);
    for (int o = 0; o < out; ++o) {
      double s = b[o];
      for (int i = 0; i < in; ++i) s += w[static_cast<std::size_t>(o) * in + i] * act[static_cast<std::size_t>(i)];
      next[static_cast<std::size_t>(o)] = l + 1 < layer_count() ? std::tanh(s) : s;
    }
    act.swap(next);
  }
  return {logistic(act[0]), std::tanh(act[1])};
}

Twist Mlp::command(std::span<const double> x, const RobotParams& robot) const {
  const auto y = forward(x);
  return {y[0] * robot.v_max, y[1] * robot.omega_max};
}

double Mlp::loss_and_gradient(std::span<const double> x, std::span<const double> target,
                              std::span<double> grad, double scale) const {
  if (x.size() != static_cast<std::size_t>(sizes_.front()) || target.size() != 2 ||
      grad.size() != params_.size()) {
    throw DimensionMismatch("loss_and_gradient: argument sizes do not match the network");
  }
  const std::size_t n_layers = layer_count();
  // acts[l] is the input of layer l; acts[n_layers] holds the raw outputs.
  std::vector<std::vector<double>> acts(n_layers + 1);
  acts[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    auto& a = acts[l + 1];
    a.assign(static_cast<std::size_t>(out), 0.0);
    for (int o = 0; o < out; ++o) {
      double s = b[o];
      for (int i = 0; i < in; ++i) s += w[static_cast<std::size_t>(o) * in + i] * acts[l][static_cast<std::size_t>(i)];
      a[static_cast<std::size_t>(o)] = l + 1 < n_layers ? std::tanh(s) : s;
    }
  }
  const auto& raw = acts[n_layers];
  const double y0 = logistic(raw[0]);
  const double y1 = std::tanh(raw[1]);
  const double e0 = y0 - target[0];
  const double e1 = y1 - target[1];
  const double loss = 0.5 * (e0 * e0 + e1 * e1);

  // delta = dLoss/d(pre-activation) of the current layer.
  std::vector<double> delta{scale * e0 * y0 * (1.0 - y0), scale * e1 * (1.0 - y1 * y1)};
  std::vector<double> prev_delta;
  for (std::size_t l = n_layers; l-- > 0;) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const double* w = params_.data() + weight_offset(l);
    double* gw = grad.data() + weight_offset(l);
    double* gb = grad.data() + bias_offset(l);
    const auto& a_in = acts[l];
    for (int o = 0; o < out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      gb[o] += d;
      for (int i = 0; i < in; ++i) gw[static_cast<std::size_t>(o) * in + i] += d * a_in[static_cast<std::size_t>(i)];
    }
    if (l == 0) break;
    prev_delta.assign(static_cast<std::size_t>(in), 0.0);
    for (int i = 0; i < in; ++i) {
      double s = 0.0;
      for (int o = 0; o < out; ++o) s += w[static_cast<std::size_t>(o) * in + i] * delta[static_cast<std::size_t>(o)];
      const double a = a_in[static_cast<std::size_t>(i)];
      prev_delta[static_cast<std::size_t>(i)] = s * (1.0 - a * a);
    }
    delta.swap(prev_delta);
  }
  return loss;
}

double Mlp::loss(std::span<const double> x, std::span<const double> target) const {
  const auto y = forward(x);
  const double e0 = y[0] - target[0];
  const double e1 = y[1] - target[1];
  return 0.5 * (e0 * e0 + e1 * e1);
}

std::string encode_weights(const Mlp& net) {
  std::string out = "MLPW 1 " + std::to_string(net.sizes().size());
  for (int s : net.sizes()) out += " " + std::to_string(s);
  out += '\n';
  char buf[64];
  for (double p : net.parameters()) {
    std::snprintf(buf, sizeof buf, "%.9g\n", p);
    out += buf;
  }
  return out;
}

Mlp decode_weights(const std::string& text) {
  std::size_t pos = 0;
  int line_no = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    auto eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    line = std::string_view(text).substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    return true;
  };
  std::string_view header;
  if (!next_line(header) || !header.starts_with("MLPW ")) {
    throw ParseError("weight file must start with 'MLPW <version>'", 1);
  }
  std::vector<long> fields;
  {
    std::size_t i = 5;
    while (i < header.size()) {
      while (i < header.size() && header[i] == ' ') ++i;
      if (i >= header.size()) break;
      long v = 0;
      const auto [ptr, ec] = std::from_chars(header.data() + i, header.data() + header.size(), v);
      if (ec != std::errc() || (ptr != header.data() + header.size() && *ptr != ' ')) {
        throw ParseError("malformed weight file header", 1);
      }
      fields.push_back(v);
      i = static_cast<std::size_t>(ptr - header.data());
    }
  }
  if (fields.empty() || fields[0] != 1) throw ParseError("unsupported weight file version", 1);
  if (fields.size() < 2 || fields[1] < 2 || static_cast<long>(fields.size()) != 2 + fields[1]) {
    throw ParseError("weight file header layer count does not match the listed sizes", 1);
  }
  std::vector<int> sizes;
  for (std::size_t i = 2; i < fields.size(); ++i) {
    if (fields[i] < 1 || fields[i] > 100000) throw ParseError("invalid layer size in header", 1);
    sizes.push_back(static_cast<int>(fields[i]));
  }
  Mlp net;
  try {
    net = Mlp(sizes);
  } catch (const DimensionMismatch& e) {
    throw ParseError(e.what(), 1);
  }
  auto params = net.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    std::string_view line;
    if (!next_line(line)) {
      throw ParseError("weight file truncated: expected " + std::to_string(params.size()) +
                       " parameters, found " + std::to_string(i));
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size() || !std::isfinite(v)) {
      throw ParseError("invalid parameter value '" + std::string(line) + "'", line_no);
    }
    params[i] = v;
  }
  std::string_view rest;
  while (next_line(rest)) {
    if (!rest.empty()) throw ParseError("unexpected trailing data in weight file", line_no);
  }
  return net;
}

void save_weights(const Mlp& net, const std::filesystem::path& path) {
  pnm::write_file(path, encode_weights(net));
}

Mlp load_weights(const std::filesystem::path& path) { return decode_weights(pnm::read_file(path)); }

double grad_check(const Mlp& net, std::span<const double> x, std::span<const double> target) {
  constexpr double h = 1e-5;
  constexpr double kFloor = 1e-8;
  std::vector<double> analytic(net.parameters().size(), 0.0);
  net.loss_and_gradient(x, target, analytic);
  Mlp probe = net;
  auto params = probe.parameters();
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = probe.loss(x, target);
    params[i] = saved - h;
    const double down = probe.loss(x, target);
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), kFloor});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

local::PolicyStep LearnedPolicy::act(const local::PolicyInput& in) {
  local::PolicyStep step;
  if (in.goal_distance < goal_tolerance_) {
    step.output.done = true;
    return step;
  }
  const FeatureVector f = extract_features(in, robot_);
  step.output.cmd = net_.command(f, robot_);
  return step;
}

}  // namespace groundnav::learn
