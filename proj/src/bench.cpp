#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "groundnav/runtime.hpp"

namespace groundnav::runtime {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

StageStats stats(const std::string& name, std::vector<double> samples) {
  StageStats s{name, 0.0, 0.0};
  if (samples.empty()) return s;
  s.mean_s = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  std::sort(samples.begin(), samples.end());
  // Nearest-rank percentile.
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(samples.size())));
  s.p95_s = samples[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

}  // namespace

BenchReport bench(const Scenario& scn, const PipelineConfig& cfg, int n_ticks) {
  if (n_ticks < 100) throw ConfigError("bench needs at least 100 ticks");
  scn.validate();
  cfg.validate();

  // Frames along the straight line from start toward the goal, facing the goal.
  constexpr int kFrames = 40;
  const double heading = std::atan2(scn.goal.y - scn.start.y, scn.goal.x - scn.start.x);
  std::vector<Pose2D> poses;
  std::vector<sim::Rendering> frames;
  std::vector<double> render_s;
  for (int i = 0; i < kFrames; ++i) {
    const double f = 0.8 * i / kFrames;
    const Pose2D pose{scn.start.x + f * (scn.goal.x - scn.start.x), scn.start.y + f * (scn.goal.y - scn.start.y),
                      heading};
    sim::RenderOptions ro;
    ro.stride_u = cfg.seg.column_stride;
    ro.stride_v = cfg.seg.row_stride;
    ro.timestamp = i;
    ro.noise = {scn.noise_sigma, scn.noise_dropout, scn.seed + static_cast<std::uint64_t>(i)};
    const auto t0 = Clock::now();
    frames.push_back(sim::render_depth(scn.scene, pose, scn.camera, ro));
    render_s.push_back(seconds_since(t0));
    poses.push_back(pose);
  }

  const mapping::OccupancyGrid world = build_prior_map(scn);
  local::RulePolicy policy(cfg.dw, scn.robot);
  const double footprint = scn.robot.radius + cfg.dw.safety_margin + cfg.seg.map_resolution;
  std::vector<double> seg_s, proj_s, pol_s, chain_s;
  for (int i = 0; i < n_ticks; ++i) {
    const auto& frame = frames[static_cast<std::size_t>(i % kFrames)].depth;
    const Pose2D& pose = poses[static_cast<std::size_t>(i % kFrames)];
    const auto t_start = Clock::now();
    const seg::PixelClassFrame classes = seg::segment(frame, scn.camera, cfg.seg);
    const auto t_seg = Clock::now();
    const seg::TraversabilityMap tmap = seg::project_to_traversability(classes, frame, scn.camera, cfg.seg);
    const auto t_proj = Clock::now();
    local::PolicyInput in;
    in.tmap = std::make_shared<const seg::TraversabilityMap>(compose_local_map(tmap, pose, world, pose, footprint));
    in.current = {0.3, 0.0};
    const Point2 g = se2_apply_inverse(pose, scn.goal);
    in.target = {std::hypot(g.x, g.y), std::atan2(g.y, g.x)};
    in.goal_distance = in.target.distance;
    const local::PolicyStep step = policy.act(in);
    const auto t_end = Clock::now();
    (void)step;
    seg_s.push_back(std::chrono::duration<double>(t_seg - t_start).count());
    proj_s.push_back(std::chrono::duration<double>(t_proj - t_seg).count());
    pol_s.push_back(std::chrono::duration<double>(t_end - t_proj).count());
    chain_s.push_back(std::chrono::duration<double>(t_end - t_start).count());
  }

  auto total = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); };
  BenchReport r;
  r.n_ticks = n_ticks;
  r.stages = {stats("render", render_s), stats("segment", seg_s), stats("project", proj_s),
              stats("policy", pol_s), stats("chain", chain_s)};
  const double n = n_ticks;
  r.perception_hz = n / (total(seg_s) + total(proj_s));
  r.policy_hz = n / total(pol_s);
  r.chain_hz = n / total(chain_s);
  r.render_hz = kFrames / total(render_s);
  return r;
}

std::string bench_csv(const BenchReport& r) {
  std::string out = "stage,mean_s,p95_s,rate_hz\n";
  char buf[200];
  for (const auto& s : r.stages) {
    double rate = s.mean_s > 0.0 ? 1.0 / s.mean_s : 0.0;
    if (s.stage == "chain") rate = r.chain_hz;
    if (s.stage == "render") rate = r.render_hz;
    if (s.stage == "policy") rate = r.policy_hz;
    std::snprintf(buf, sizeof buf, "%s,%.9f,%.9f,%.3f\n", s.stage.c_str(), s.mean_s, s.p95_s, rate);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "perception,,,%.3f\n", r.perception_hz);
  out += buf;
  return out;
}

}  // namespace groundnav::runtime
