// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [--only NAME]...

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "groundnav/mapping.hpp"
#include "groundnav/planner.hpp"
#include "groundnav/runtime.hpp"
#include "oracles.hpp"

using namespace groundnav;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Scenario data_scenario(const std::string& name) {
  return load_scenario_file(std::string(GROUNDNAV_DATA_DIR) + "/scenarios/" + name + ".scn");
}

// ---------------------------------------------------------------------------

Verdict throughput() {
  const Scenario scn = data_scenario("default");
  const runtime::PipelineConfig cfg;  // column/row stride 2
  const auto r = runtime::bench(scn, cfg, 1000);
  const bool pass = r.chain_hz >= 18.0;
  return {pass, fmt("chain %.1f Hz over %d ticks (margin %.1fx of 18 Hz); perception %.1f Hz, policy %.1f Hz, "
                    "render %.1f Hz (excluded)",
                    r.chain_hz, r.n_ticks, r.chain_hz / 18.0, r.perception_hz, r.policy_hz, r.render_hz)};
}

Verdict segmentation() {
  std::mt19937_64 rng(2024);
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  const CameraModel cam;
  const seg::SegParams sp;
  std::size_t sampled = 0, agree = 0, og = 0;
  double worst = 1.0;
  for (int k = 0; k < 100; ++k) {
    sim::Scene scene;
    const int n = std::uniform_int_distribution<int>(1, 6)(rng);
    for (int i = 0; i < n; ++i) {
      const double cx = uni(0.5, 4.0), cy = uni(-2.0, 2.0), h = uni(0.1, 0.8);
      if (uni(0.0, 1.0) < 0.5) {
        const double hx = uni(0.1, 0.5), hy = uni(0.1, 0.5);
        scene.boxes.push_back({cx - hx, cx + hx, cy - hy, cy + hy, h, true});
      } else {
        scene.cylinders.push_back({cx, cy, uni(0.05, 0.4), h, true});
      }
    }
    const auto r = sim::render_depth(scene, {}, cam);
    const auto acc = runtime::evaluate_segmentation(seg::segment(r.depth, cam, sp), r, scene, cam, sp);
    sampled += acc.sampled;
    agree += acc.agree;
    og += acc.obstacle_as_ground;
    worst = std::min(worst, acc.accuracy());
  }
  const double rate = static_cast<double>(agree) / static_cast<double>(sampled);
  return {rate >= 0.98 && og == 0,
          fmt("agreement %.4f over 100 scenes (%zu pixels, worst scene %.4f), obstacle->ground %zu", rate, sampled,
              worst, og)};
}

Verdict planner() {
  std::mt19937_64 rng(77);
  constexpr int n = 64;
  GridGeometry g;
  g.cols = n;
  g.rows = n;
  int solved = 0, unsolvable = 0, mismatches = 0, lethal = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> cost(static_cast<std::size_t>(n) * n);
    for (double& c : cost) c = u(rng) < 0.5 ? 0.0 : u(rng);
    std::uniform_int_distribution<int> pos(0, n - 1), len(1, n / 3), cnt(4, 16);
    const int rects = cnt(rng);
    for (int k = 0; k < rects; ++k) {
      const int c0 = pos(rng), r0 = pos(rng);
      const int w = u(rng) < 0.5 ? 1 : len(rng), h = u(rng) < 0.5 ? len(rng) : 1;
      for (int r = r0; r < std::min(n, r0 + h); ++r) {
        for (int c = c0; c < std::min(n, c0 + w); ++c) cost[static_cast<std::size_t>(r) * n + c] = planning::kLethal;
      }
    }
    const planning::Costmap cm(g, cost);
    auto free_cell = [&] {
      for (;;) {
        const Cell c{pos(rng), pos(rng)};
        if (!cm.lethal(c)) return c;
      }
    };
    const Cell s = free_cell(), goal = free_cell();
    const double want = oracle::dijkstra(n, n, cost, s, goal);
    if (std::isinf(want)) {
      ++unsolvable;
      try {
        planning::plan(cm, s, goal);
        ++mismatches;
      } catch (const planning::PlanningError&) {
      }
      continue;
    }
    const auto p = planning::plan(cm, s, goal);
    ++solved;
    const double err = std::abs(p.total_cost - want);
    worst = std::max(worst, err);
    if (err > 1e-9) ++mismatches;
    for (const Cell& c : p.cells) lethal += cm.lethal(c) ? 1 : 0;
  }
  return {mismatches == 0 && lethal == 0,
          fmt("%d solved, %d unsolvable (both agree on failure), cost mismatches %d, worst |diff| %.3g, "
              "lethal path cells %d",
              solved, unsolvable, mismatches, worst, lethal)};
}

Verdict dwa_oracle() {
  std::mt19937_64 rng(31);
  const local::DWParams p;
  const RobotParams robot;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int mismatches = 0, blocked = 0;
  for (int k = 0; k < 100; ++k) {
    local::PolicyInput in;
    in.tmap = std::make_shared<const seg::TraversabilityMap>(oracle::random_tmap(rng));
    in.current = {u(rng) * robot.v_max, (2 * u(rng) - 1) * robot.omega_max};
    in.goal_distance = 0.3 + 3 * u(rng);
    in.target = {in.goal_distance, (2 * u(rng) - 1) * kPi};
    const auto got = local::rule_policy(in, p, robot);
    const auto want = oracle::brute_force_dwa(in, p, robot);
    if (want.blocked) ++blocked;
    if (got.all_blocked != want.blocked || (!want.blocked && got.chosen_index != want.index)) ++mismatches;
  }
  return {mismatches == 0, fmt("100 random inputs, %d all-blocked, mismatches %d", blocked, mismatches)};
}

std::vector<Scenario> scenarios(std::uint64_t first, int count) {
  std::vector<Scenario> out;
  for (int i = 0; i < count; ++i) out.push_back(runtime::random_scenario(first + static_cast<std::uint64_t>(i)));
  return out;
}

struct Tally {
  int reached = 0;
  std::string failures;
};

Tally evaluate(const std::vector<Scenario>& scns, const runtime::PipelineConfig& cfg,
               const std::function<std::unique_ptr<local::Policy>(const Scenario&)>& make) {
  Tally t;
  for (const Scenario& s : scns) {
    auto policy = make(s);
    const auto r = runtime::run_navigation(s, cfg, *policy);
    if (r.outcome == runtime::Outcome::Reached) {
      ++t.reached;
    } else {
      t.failures += fmt(" %llu:%s", static_cast<unsigned long long>(s.seed), r.reason.c_str());
    }
  }
  return t;
}

Verdict navigation() {
  const auto t0 = Clock::now();
  const runtime::PipelineConfig cfg;
  const auto held_out = scenarios(1000, 50);
  const Tally rule = evaluate(held_out, cfg, [&](const Scenario& s) {
    return std::make_unique<local::RulePolicy>(cfg.dw, s.robot);
  });
  const auto data = runtime::collect_dataset(scenarios(0, 100), cfg, 0);
  const auto trained = learn::train(data, held_out.front().robot, {});
  const Tally learned = evaluate(held_out, cfg, [&](const Scenario& s) {
    return std::make_unique<learn::LearnedPolicy>(trained.net, s.robot, cfg.dw.goal_tolerance);
  });
  const double minutes = std::chrono::duration<double>(Clock::now() - t0).count() / 60.0;
  const bool pass = rule.reached >= 48 && learned.reached >= 40 && minutes < 10.0;
  return {pass, fmt("rule %d/50 (need 48), learned %d/50 (need 40) on seeds 1000-1049 after %zu samples from "
                    "seeds 0-99, final loss %.5f, %.1f min; rule misses:%s; learned misses:%s",
                    rule.reached, learned.reached, data.samples.size(), trained.loss_curve.back(), minutes,
                    rule.failures.empty() ? " none" : rule.failures.c_str(),
                    learned.failures.empty() ? " none" : learned.failures.c_str())};
}

Verdict gradient_check() {
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const auto net = learn::Mlp::xavier(learn::Mlp::policy_shape(), rng());
    std::vector<double> x(learn::kFeatureSize);
    for (double& v : x) v = unit(rng);
    const std::vector<double> target{0.5 * (unit(rng) + 1.0), unit(rng)};
    worst = std::max(worst, learn::grad_check(net, x, target));
  }
  return {worst <= 1e-4, fmt("max relative error %.3e over 20 triples", worst)};
}

// Compact property sweeps; the unit test suites cover the same ground in detail.
Verdict invariants() {
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::string> broken;

  double se2 = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const Pose2D a{5 * u(rng), 5 * u(rng), 4 * u(rng)};
    const Pose2D b{5 * u(rng), 5 * u(rng), 4 * u(rng)};
    const Pose2D id = se2_compose(a, se2_inverse(a));
    se2 = std::max({se2, std::abs(id.x), std::abs(id.y), std::abs(id.theta)});
    const Point2 q{u(rng), u(rng)};
    const Point2 back = se2_apply_inverse(a, se2_apply(a, q));
    se2 = std::max({se2, std::abs(back.x - q.x), std::abs(back.y - q.y)});
    const Point2 via = se2_apply(se2_compose(a, b), q);
    const Point2 step = se2_apply(a, se2_apply(b, q));
    se2 = std::max({se2, std::abs(via.x - step.x), std::abs(via.y - step.y)});
  }
  if (se2 > 1e-9) broken.push_back(fmt("geometry %.2g", se2));

  int unicycle_bad = 0;
  for (int k = 0; k < 2000; ++k) {
    const Pose2D p{u(rng), u(rng), 3 * u(rng)};
    const double v = u(rng), t = 0.5 * (u(rng) + 1.0);
    const Pose2D straight = unicycle_step(p, {v, 0.0}, t);
    for (double w : {1e-3, 1e-6, 1e-9, -1e-6}) {
      const Pose2D q = unicycle_step(p, {v, w}, t);
      const double bound = std::abs(v * w) * t * t + 1e-12;
      if (std::hypot(q.x - straight.x, q.y - straight.y) > bound) ++unicycle_bad;
    }
  }
  if (unicycle_bad) broken.push_back(fmt("unicycle continuity %d", unicycle_bad));

  int logodds_bad = 0;
  GridGeometry small;
  small.cols = 4;
  small.rows = 4;
  for (int k = 0; k < 500; ++k) {
    std::vector<double> updates;
    const int n = 1 + static_cast<int>(rng() % 10);
    for (int i = 0; i < n; ++i) updates.push_back(rng() % 2 ? mapping::kLogOddsHit : mapping::kLogOddsMiss);
    mapping::OccupancyGrid a(small), b(small);
    for (double x : updates) a.add_logodds({1, 2}, x);
    std::shuffle(updates.begin(), updates.end(), rng);
    for (double x : updates) b.add_logodds({1, 2}, x);
    if (std::abs(a.logodds({1, 2}) - b.logodds({1, 2})) > 1e-12 || a.occupancy({1, 2}) != b.occupancy({1, 2})) {
      ++logodds_bad;
    }
  }
  if (logodds_bad) broken.push_back(fmt("log-odds order %d", logodds_bad));

  int map_bad = 0;
  for (int k = 0; k < 50; ++k) {
    GridGeometry g;
    g.resolution = 0.05 * (1 + k % 3);
    g.origin = {u(rng), u(rng), 0.0};
    g.cols = 3 + static_cast<int>(rng() % 40);
    g.rows = 3 + static_cast<int>(rng() % 40);
    mapping::OccupancyGrid grid(g);
    for (std::size_t i = 0; i < g.size(); ++i) grid.set_logodds(g.cell_at(i), 10 * u(rng));
    const auto back = mapping::decode_map(mapping::encode_map_pgm(grid), mapping::encode_map_meta(grid));
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (back.occupancy(g.cell_at(i)) != grid.occupancy(g.cell_at(i))) ++map_bad;
    }
    if (back.geometry().cols != g.cols || back.geometry().rows != g.rows) ++map_bad;
  }
  if (map_bad) broken.push_back(fmt("map round trip %d", map_bad));

  int fsm_bad = 0;
  for (int k = 0; k < 1000; ++k) {
    runtime::NavStateMachine m;
    for (int step = 0; step < 10; ++step) {
      const auto from = m.state();
      const auto to = static_cast<runtime::NavState>(rng() % 5);
      bool threw = false;
      try {
        m.transition(to, step);
      } catch (const std::logic_error&) {
        threw = true;
      }
      if (threw == runtime::NavStateMachine::legal(from, to) || (threw && m.state() != from)) ++fsm_bad;
    }
  }
  if (fsm_bad) broken.push_back(fmt("state machine %d", fsm_bad));

  // Freshness watchdog: slow perception, every moving command must rest on a fresh snapshot.
  int stale = 0, watchdog_ticks = 0;
  runtime::PipelineConfig cfg;
  cfg.perception_rate = 3.0;
  cfg.timeout = 15.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Scenario s = runtime::random_scenario(seed);
    local::RulePolicy policy(cfg.dw, s.robot);
    const auto r = runtime::run_navigation(s, cfg, policy);
    for (const auto& t : r.ticks) {
      watchdog_ticks += t.watchdog ? 1 : 0;
      if (t.cmd != Twist{0.0, 0.0} && t.perception_age > cfg.stale_timeout + 1e-9) ++stale;
    }
  }
  if (stale || watchdog_ticks == 0) broken.push_back(fmt("watchdog stale=%d stops=%d", stale, watchdog_ticks));

  std::string detail = "geometry, unicycle, log-odds, map round trip, state machine, watchdog";
  if (!broken.empty()) {
    detail += "; broken:";
    for (const auto& b : broken) detail += " [" + b + "]";
  }
  return {broken.empty(), detail};
}

struct Criterion {
  const char* name;
  Verdict (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion all[] = {
      {"throughput", throughput},         {"segmentation", segmentation}, {"planner", planner},
      {"dwa_oracle", dwa_oracle},         {"navigation", navigation},     {"gradient_check", gradient_check},
      {"invariants", invariants},
  };
  std::vector<std::string> only;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (std::string(argv[i]) == "--only") only.emplace_back(argv[i + 1]);
  }
  int failed = 0;
  for (const Criterion& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::printf("%s %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str(), secs);
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
