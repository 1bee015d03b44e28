// groundnav command-line front end.
//
// Exit codes: 0 ok, 1 other failure, 2 bad input, 3 I/O error, 4 no path,
// 5 collision, 6 timeout, 7 navigation failed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "groundnav/errors.hpp"
#include "groundnav/groundseg.hpp"
#include "groundnav/log.hpp"
#include "groundnav/mapping.hpp"
#include "groundnav/planner.hpp"
#include "groundnav/pnm.hpp"
#include "groundnav/policy_learn.hpp"
#include "groundnav/runtime.hpp"
#include "groundnav/scenario.hpp"
#include "groundnav/simenv.hpp"

namespace fs = std::filesystem;
using namespace groundnav;

namespace {

enum Exit : int {
  kOk = 0,
  kOther = 1,
  kBadInput = 2,
  kIo = 3,
  kNoPath = 4,
  kCollision = 5,
  kTimeout = 6,
  kFailed = 7,
};

// Artifacts are assembled in memory and only written once everything succeeded.
struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;
  void add(std::string name, std::string bytes) { files.emplace_back(std::move(name), std::move(bytes)); }
  void write(const fs::path& dir) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    for (const auto& [name, bytes] : files) pnm::write_file(dir / name, bytes);
  }
};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// A missing input file is a usage error, not an I/O failure.
void require_input(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) throw ValidationError(std::string(what) + " not found: " + path);
}

Scenario load_with_seed(const std::string& path, std::optional<std::uint64_t> seed) {
  require_input(path, "scenario file");
  Scenario scn = load_scenario_file(path);
  if (seed) scn.seed = *seed;
  return scn;
}

// ---- segment ---------------------------------------------------------------

struct SegmentArgs {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
};

int cmd_segment(const SegmentArgs& a) {
  const Scenario scn = load_with_seed(a.scenario, a.seed);
  const runtime::PipelineConfig cfg;
  sim::RenderOptions ro;
  ro.noise = {scn.noise_sigma, scn.noise_dropout, scn.seed};
  const sim::Rendering r = sim::render_depth(scn.scene, scn.start, scn.camera, ro);
  const seg::PixelClassFrame classes = seg::segment(r.depth, scn.camera, cfg.seg);
  const seg::TraversabilityMap tmap = seg::project_to_traversability(classes, r.depth, scn.camera, cfg.seg);
  const runtime::SegAccuracy acc = runtime::evaluate_segmentation(classes, r, scn.scene, scn.camera, cfg.seg);

  std::vector<std::uint16_t> mm(r.depth.depth.size(), 0);
  for (std::size_t i = 0; i < mm.size(); ++i) {
    const double z = r.depth.depth[i];
    if (std::isfinite(z) && z > 0.0) mm[i] = static_cast<std::uint16_t>(std::min(65535.0, std::round(z * 1000.0)));
  }
  Artifacts out;
  out.add("depth.pgm", pnm::encode_pgm16(r.depth.width, r.depth.height, mm));
  out.add("classes.ppm", seg::encode_classes_ppm(classes));
  out.add("traversability.pgm", seg::encode_traversability_pgm(tmap));
  char buf[256];
  std::snprintf(buf, sizeof buf, "accuracy %.6f\nsampled %zu\nagree %zu\nobstacle_as_ground %zu\n", acc.accuracy(),
                acc.sampled, acc.agree, acc.obstacle_as_ground);
  out.add("accuracy.txt", buf);
  out.write(a.out);
  std::printf("accuracy %.6f (%zu/%zu), obstacle_as_ground %zu\n", acc.accuracy(), acc.agree, acc.sampled,
              acc.obstacle_as_ground);
  return kOk;
}

// ---- plan ------------------------------------------------------------------

struct PlanArgs {
  std::string map;
  std::vector<double> start;
  std::vector<double> goal;
  std::string out;
  double radius = 0.15;
  double inflation = 0.45;
};

int cmd_plan(const PlanArgs& a) {
  require_input(a.map, "map image");
  require_input(mapping::meta_path_for(a.map).string(), "map sidecar");
  const mapping::OccupancyGrid grid = mapping::load_map(a.map);
  RobotParams robot;
  robot.radius = a.radius;
  robot.validate();
  if (!(a.inflation >= a.radius)) throw ValidationError("--inflation must be >= --radius");
  const GridGeometry& g = grid.geometry();
  const auto s = world_to_grid(g, a.start[0], a.start[1]);
  if (!s) throw planning::PlanningError(planning::PlanFailure::StartInvalid, "start lies outside the map");
  const auto t = world_to_grid(g, a.goal[0], a.goal[1]);
  if (!t) throw planning::PlanningError(planning::PlanFailure::GoalInvalid, "goal lies outside the map");
  const planning::Costmap cm = planning::inflate(grid, robot, a.inflation);
  const planning::Path path = planning::plan(cm, *s, *t);
  const std::vector<Cell> wps = planning::shortcut(path, cm);

  Artifacts out;
  out.add("path.csv", planning::cells_csv(g, path.cells));
  out.add("waypoints.csv", planning::cells_csv(g, wps));
  out.add("overlay.pgm", planning::overlay_pgm(grid, path.cells, wps));
  out.write(a.out);
  std::printf("total_cost %.12f\ncells %zu\nwaypoints %zu\n", path.total_cost, path.cells.size(),
              wps.size());
  return kOk;
}

// ---- navigate --------------------------------------------------------------

struct NavigateArgs {
  std::string scenario;
  std::string policy = "rule";
  double timeout = 60.0;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool dead_reckoning = false;
};

int cmd_navigate(const NavigateArgs& a) {
  const Scenario scn = load_with_seed(a.scenario, a.seed);
  runtime::PipelineConfig cfg;
  cfg.timeout = a.timeout;
  if (a.dead_reckoning) cfg.pose_source = runtime::PoseSource::DeadReckoning;
  cfg.validate();

  std::unique_ptr<local::Policy> policy;
  if (a.policy == "rule") {
    policy = std::make_unique<local::RulePolicy>(cfg.dw, scn.robot);
  } else if (a.policy.rfind("learned:", 0) == 0) {
    const std::string weights = a.policy.substr(8);
    if (weights.empty()) throw ValidationError("--policy learned:W needs a weight file");
    require_input(weights, "weight file");
    learn::Mlp net = learn::load_weights(weights);
    if (net.sizes() != learn::Mlp::policy_shape()) {
      throw ParseError(weights + ": network shape does not match the policy input/output sizes");
    }
    policy = std::make_unique<learn::LearnedPolicy>(std::move(net), scn.robot, cfg.dw.goal_tolerance);
  } else {
    throw ValidationError("--policy must be 'rule' or 'learned:<weights>'");
  }

  const runtime::RunReport r = runtime::run_navigation(scn, cfg, *policy);
  Artifacts out;
  out.add("trajectory.csv", runtime::trajectory_csv(r));
  out.add("ticks.csv", runtime::ticks_csv(r));
  out.add("decisions.csv", runtime::decisions_csv(r));
  std::string summary = std::string("outcome ") + runtime::to_string(r.outcome) + "\nreason " + r.reason +
                        "\nticks " + std::to_string(r.ticks.size()) + "\nreplans " + std::to_string(r.replans) + "\n";
  if (!r.trajectory.empty()) {
    const auto& p = r.trajectory.back();
    summary += "final " + fmt_double(p.pose.x) + " " + fmt_double(p.pose.y) + " " + fmt_double(p.pose.theta) +
               "\ntime " + fmt_double(p.time) + "\n";
  }
  out.add("summary.txt", summary);
  out.write(a.out);
  std::printf("%s", summary.c_str());
  switch (r.outcome) {
    case runtime::Outcome::Reached: return kOk;
    case runtime::Outcome::Collision: return kCollision;
    case runtime::Outcome::Timeout: return kTimeout;
    case runtime::Outcome::Failed: return kFailed;
  }
  return kOther;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string out;
  int epochs = 50;
  int scenarios = 100;
  int first_seed = 0;
  double learning_rate = 1e-3;
  int batch = 64;
  std::uint64_t seed = 0;
};

int cmd_train(const TrainArgs& a) {
  if (a.scenarios < 1) throw ValidationError("--scenarios must be >= 1");
  learn::TrainParams tp;
  tp.epochs = a.epochs;
  tp.learning_rate = a.learning_rate;
  tp.batch_size = a.batch;
  tp.seed = a.seed;
  if (tp.batch_size < 1 || tp.epochs < 0 || !(tp.learning_rate > 0.0)) {
    throw ValidationError("invalid training hyper-parameters");
  }
  learn::TrainResult result{learn::Mlp::xavier(learn::Mlp::policy_shape(), a.seed), {}};
  std::size_t n_samples = 0;
  if (a.epochs > 0) {
    const runtime::PipelineConfig cfg;
    std::vector<Scenario> scns;
    for (int i = 0; i < a.scenarios; ++i) scns.push_back(runtime::random_scenario(static_cast<std::uint64_t>(a.first_seed + i)));
    const learn::Dataset data = runtime::collect_dataset(scns, cfg, a.seed);
    n_samples = data.samples.size();
    spdlog::info("collected {} samples from {} scenarios", n_samples, scns.size());
    result = learn::train(data, scns.front().robot, tp);
  }
  std::string loss = "epoch,loss\n";
  for (std::size_t e = 0; e < result.loss_curve.size(); ++e) {
    loss += std::to_string(e) + "," + fmt_double(result.loss_curve[e]) + "\n";
  }
  Artifacts out;
  out.add("weights.txt", learn::encode_weights(result.net));
  out.add("loss.csv", loss);
  out.write(a.out);
  std::printf("samples %zu\nepochs %d\n", n_samples, a.epochs);
  if (!result.loss_curve.empty()) std::printf("final_loss %s\n", fmt_double(result.loss_curve.back()).c_str());
  return kOk;
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
  std::string scenario;
  int ticks = 1000;
  std::string out;
  std::uint64_t seed = 0;
  int column_stride = 2;
};

int cmd_bench(const BenchArgs& a) {
  if (a.ticks < 100) throw ValidationError("--ticks must be >= 100");
  const Scenario scn = a.scenario.empty() ? runtime::random_scenario(a.seed) : load_with_seed(a.scenario, {});
  runtime::PipelineConfig cfg;
  cfg.seg.column_stride = a.column_stride;
  cfg.validate();
  const runtime::BenchReport r = runtime::bench(scn, cfg, a.ticks);
  Artifacts out;
  out.add("bench.csv", runtime::bench_csv(r));
  if (!a.out.empty()) out.write(a.out);
  std::printf("ticks %d\nchain_hz %.2f\nperception_hz %.2f\npolicy_hz %.2f\nrender_hz %.2f\n", r.n_ticks, r.chain_hz,
              r.perception_hz, r.policy_hz, r.render_hz);
  return kOk;
}

// ---- gradcheck -------------------------------------------------------------

struct GradcheckArgs {
  int triples = 20;
  std::uint64_t seed = 0;
};

int cmd_gradcheck(const GradcheckArgs& a) {
  if (a.triples < 1) throw ValidationError("--triples must be >= 1");
  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < a.triples; ++k) {
    const learn::Mlp net = learn::Mlp::xavier(learn::Mlp::policy_shape(), rng());
    std::vector<double> x(learn::kFeatureSize);
    for (double& v : x) v = unit(rng);
    const std::vector<double> target{0.5 * (unit(rng) + 1.0), unit(rng)};
    worst = std::max(worst, learn::grad_check(net, x, target));
  }
  std::printf("max_rel_error %.3e\n", worst);
  return worst <= 1e-4 ? kOk : kOther;
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"Depth-camera ground segmentation and navigation toolkit"};
  app.require_subcommand(1);

  SegmentArgs seg_a;
  auto* seg_cmd = app.add_subcommand("segment", "Segment the start view of a scenario");
  seg_cmd->add_option("--scenario", seg_a.scenario, "Scenario file")->required();
  seg_cmd->add_option("--out", seg_a.out, "Output directory")->required();
  seg_cmd->add_option("--seed", seg_a.seed, "Override the scenario seed");

  PlanArgs plan_a;
  auto* plan_cmd = app.add_subcommand("plan", "Plan a global path on an occupancy map");
  plan_cmd->add_option("--map", plan_a.map, "Map image (PGM) with a .meta sidecar")->required();
  plan_cmd->add_option("--start", plan_a.start, "Start X Y (m)")->expected(2)->required();
  plan_cmd->add_option("--goal", plan_a.goal, "Goal X Y (m)")->expected(2)->required();
  plan_cmd->add_option("--out", plan_a.out, "Output directory")->required();
  plan_cmd->add_option("--radius", plan_a.radius, "Lethal radius (m)")->capture_default_str();
  plan_cmd->add_option("--inflation", plan_a.inflation, "Inflation radius (m)")->capture_default_str();
  plan_cmd->add_option("--seed", "Accepted for uniformity; planning is deterministic");

  NavigateArgs nav_a;
  auto* nav_cmd = app.add_subcommand("navigate", "Run a closed-loop navigation episode");
  nav_cmd->add_option("--scenario", nav_a.scenario, "Scenario file")->required();
  nav_cmd->add_option("--policy", nav_a.policy, "rule or learned:<weights>")->capture_default_str();
  nav_cmd->add_option("--timeout", nav_a.timeout, "Simulated time limit (s)")->capture_default_str();
  nav_cmd->add_option("--out", nav_a.out, "Output directory")->required();
  nav_cmd->add_option("--seed", nav_a.seed, "Override the scenario seed");
  nav_cmd->add_flag("--dead-reckoning", nav_a.dead_reckoning, "Localize by integrating commands");

  TrainArgs train_a;
  auto* train_cmd = app.add_subcommand("train", "Behavior-clone the rule policy into an MLP");
  train_cmd->add_option("--out", train_a.out, "Output directory (weights.txt, loss.csv)")->required();
  train_cmd->add_option("--epochs", train_a.epochs, "Training epochs")->capture_default_str();
  train_cmd->add_option("--scenarios", train_a.scenarios, "Number of random training scenarios")->capture_default_str();
  train_cmd->add_option("--first-scenario", train_a.first_seed, "Seed of the first training scenario")->capture_default_str();
  train_cmd->add_option("--lr", train_a.learning_rate, "Learning rate")->capture_default_str();
  train_cmd->add_option("--batch", train_a.batch, "Mini-batch size")->capture_default_str();
  train_cmd->add_option("--seed", train_a.seed, "Initialization and shuffling seed")->capture_default_str();

  BenchArgs bench_a;
  auto* bench_cmd = app.add_subcommand("bench", "Time the perception to command chain");
  bench_cmd->add_option("--scenario", bench_a.scenario, "Scenario file (default: random room)");
  bench_cmd->add_option("--ticks", bench_a.ticks, "Number of ticks (>= 100)")->capture_default_str();
  bench_cmd->add_option("--out", bench_a.out, "Output directory for bench.csv");
  bench_cmd->add_option("--seed", bench_a.seed, "Seed of the random room")->capture_default_str();
  bench_cmd->add_option("--column-stride", bench_a.column_stride, "Segmentation column stride")->capture_default_str();

  GradcheckArgs gc_a;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Compare backprop with finite differences");
  gc_cmd->add_option("--triples", gc_a.triples, "Random (network, input, target) triples")->capture_default_str();
  gc_cmd->add_option("--seed", gc_a.seed, "Seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (*seg_cmd) return cmd_segment(seg_a);
    if (*plan_cmd) return cmd_plan(plan_a);
    if (*nav_cmd) return cmd_navigate(nav_a);
    if (*train_cmd) return cmd_train(train_a);
    if (*bench_cmd) return cmd_bench(bench_a);
    if (*gc_cmd) return cmd_gradcheck(gc_a);
  } catch (const planning::PlanningError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.kind() == planning::PlanFailure::NoPath ? kNoPath : kBadInput;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kBadInput;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kBadInput;
  } catch (const DimensionMismatch& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kBadInput;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kOther;
  }
  return kOther;
}
