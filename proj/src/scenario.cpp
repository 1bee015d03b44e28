#include "groundnav/scenario.hpp"

#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "groundnav/errors.hpp"
#include "groundnav/pnm.hpp"

namespace groundnav {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double to_double(std::string_view tok, int line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError("invalid number '" + std::string(tok) + "'", line);
  }
  return v;
}

std::vector<double> numbers(std::string_view value, std::size_t count, int line,
                            bool* unmapped = nullptr) {
  auto toks = split_ws(value);
  if (unmapped != nullptr) {
    *unmapped = !toks.empty() && toks.back() == "unmapped";
    if (*unmapped) toks.pop_back();
  }
  if (toks.size() != count) {
    throw ParseError("expected " + std::to_string(count) + " values, got " +
                         std::to_string(toks.size()),
                     line);
  }
  std::vector<double> out;
  out.reserve(count);
  for (auto t : toks) out.push_back(to_double(t, line));
  return out;
}

int to_int(std::string_view value, int line) {
  const double d = numbers(value, 1, line)[0];
  if (d != std::floor(d) || std::abs(d) > 1e9) throw ParseError("expected an integer", line);
  return static_cast<int>(d);
}

void check(bool ok, const std::string& what, int line) {
  if (!ok) throw ValidationError(what, line);
}

}  // namespace

void Scenario::validate() const {
  scene.validate();
  camera.validate();
  robot.validate();
  if (!(std::isfinite(map_resolution) && map_resolution > 0.0)) {
    throw ValidationError("map.resolution must be positive");
  }
  if (!(noise_sigma >= 0.0) || !(noise_dropout >= 0.0 && noise_dropout <= 1.0)) {
    throw ValidationError("noise parameters out of range");
  }
  if (!scene.bounds.contains(start.x, start.y)) throw ValidationError("start lies outside bounds");
  if (!scene.bounds.contains(goal.x, goal.y)) throw ValidationError("goal lies outside bounds");
}

Scenario load_scenario(std::string_view text) {
  Scenario s;
  std::set<std::string, std::less<>> seen;
  std::map<std::string, int, std::less<>> key_line;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string_view key = trim(raw.substr(0, eq));
    const std::string_view value = trim(raw.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);

    if (key == "box") {
      bool unmapped = false;
      const auto v = numbers(value, 5, line_no, &unmapped);
      s.scene.boxes.push_back({v[0], v[1], v[2], v[3], v[4], !unmapped});
      check(v[0] < v[1] && v[2] < v[3], "box extents must be positive", line_no);
      check(v[4] > 0.0, "box height must be positive", line_no);
      continue;
    }
    if (key == "cylinder") {
      bool unmapped = false;
      const auto v = numbers(value, 4, line_no, &unmapped);
      s.scene.cylinders.push_back({v[0], v[1], v[2], v[3], !unmapped});
      check(v[2] > 0.0, "cylinder radius must be positive", line_no);
      check(v[3] > 0.0, "cylinder height must be positive", line_no);
      continue;
    }
    if (seen.contains(key)) throw ParseError("duplicate key '" + std::string(key) + "'", line_no);
    seen.emplace(key);
    key_line.emplace(std::string(key), line_no);

    auto scalar = [&] { return numbers(value, 1, line_no)[0]; };
    if (key == "name") {
      if (value.empty()) throw ParseError("empty name", line_no);
      s.name = std::string(value);
    } else if (key == "seed") {
      const double d = scalar();
      if (d < 0 || d != std::floor(d) || d > 9.0e15) throw ParseError("seed must be a non-negative integer", line_no);
      s.seed = static_cast<std::uint64_t>(d);
    } else if (key == "start") {
      const auto v = numbers(value, 3, line_no);
      s.start = {v[0], v[1], normalize_angle(v[2])};
    } else if (key == "goal") {
      const auto v = numbers(value, 2, line_no);
      s.goal = {v[0], v[1]};
    } else if (key == "bounds") {
      const auto v = numbers(value, 4, line_no);
      s.scene.bounds = {v[0], v[1], v[2], v[3]};
      check(v[0] < v[1] && v[2] < v[3], "bounds must have positive extent", line_no);
    } else if (key == "camera.fx") {
      s.camera.fx = scalar();
    } else if (key == "camera.fy") {
      s.camera.fy = scalar();
    } else if (key == "camera.cx") {
      s.camera.cx = scalar();
    } else if (key == "camera.cy") {
      s.camera.cy = scalar();
    } else if (key == "camera.width") {
      s.camera.width = to_int(value, line_no);
    } else if (key == "camera.height") {
      s.camera.height = to_int(value, line_no);
    } else if (key == "camera.mount_height") {
      s.camera.mount_height = scalar();
    } else if (key == "camera.pitch") {
      s.camera.pitch = scalar();
    } else if (key == "camera.min_depth") {
      s.camera.min_depth = scalar();
    } else if (key == "camera.max_depth") {
      s.camera.max_depth = scalar();
    } else if (key == "robot.radius") {
      s.robot.radius = scalar();
    } else if (key == "robot.clearance_height") {
      s.robot.clearance_height = scalar();
    } else if (key == "robot.v_max") {
      s.robot.v_max = scalar();
    } else if (key == "robot.omega_max") {
      s.robot.omega_max = scalar();
    } else if (key == "robot.a_max") {
      s.robot.a_max = scalar();
    } else if (key == "robot.alpha_max") {
      s.robot.alpha_max = scalar();
    } else if (key == "noise.sigma") {
      s.noise_sigma = scalar();
    } else if (key == "noise.dropout") {
      s.noise_dropout = scalar();
    } else if (key == "map.resolution") {
      s.map_resolution = scalar();
      check(s.map_resolution > 0.0, "map.resolution must be positive", line_no);
    } else {
      throw ParseError("unknown key '" + std::string(key) + "'", line_no);
    }
  }
  if (!seen.contains("start")) throw ParseError("missing required key 'start'");
  if (!seen.contains("goal")) throw ParseError("missing required key 'goal'");

  // Attribute invariant failures to the line that set the offending group.
  auto line_of = [&](std::string_view prefix) {
    int best = 0;
    for (const auto& [k, l] : key_line) {
      if (k.starts_with(prefix)) best = std::max(best, l);
    }
    return best;
  };
  try {
    s.camera.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(e.what(), line_of("camera."));
  }
  try {
    s.robot.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(e.what(), line_of("robot."));
  }
  try {
    s.validate();
  } catch (const ValidationError& e) {
    int line = 0;
    const std::string msg = e.what();
    if (msg.starts_with("start")) line = line_of("start");
    else if (msg.starts_with("goal")) line = line_of("goal");
    else if (msg.starts_with("noise")) line = line_of("noise.");
    throw ValidationError(msg, line);
  }
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  return load_scenario(pnm::read_file(path));
}

std::string format_scenario(const Scenario& s) {
  std::string out;
  char buf[256];
  auto line = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out += buf;
    out += '\n';
  };
  out += "name = " + s.name + "\n";
  line("seed = %llu", static_cast<unsigned long long>(s.seed));
  line("start = %.17g %.17g %.17g", s.start.x, s.start.y, s.start.theta);
  line("goal = %.17g %.17g", s.goal.x, s.goal.y);
  const auto& b = s.scene.bounds;
  line("bounds = %.17g %.17g %.17g %.17g", b.x_min, b.x_max, b.y_min, b.y_max);
  line("map.resolution = %.17g", s.map_resolution);
  line("noise.sigma = %.17g", s.noise_sigma);
  line("noise.dropout = %.17g", s.noise_dropout);
  const auto& c = s.camera;
  line("camera.fx = %.17g", c.fx);
  line("camera.fy = %.17g", c.fy);
  line("camera.cx = %.17g", c.cx);
  line("camera.cy = %.17g", c.cy);
  line("camera.width = %d", c.width);
  line("camera.height = %d", c.height);
  line("camera.mount_height = %.17g", c.mount_height);
  line("camera.pitch = %.17g", c.pitch);
  line("camera.min_depth = %.17g", c.min_depth);
  line("camera.max_depth = %.17g", c.max_depth);
  const auto& r = s.robot;
  line("robot.radius = %.17g", r.radius);
  line("robot.clearance_height = %.17g", r.clearance_height);
  line("robot.v_max = %.17g", r.v_max);
  line("robot.omega_max = %.17g", r.omega_max);
  line("robot.a_max = %.17g", r.a_max);
  line("robot.alpha_max = %.17g", r.alpha_max);
  for (const auto& bx : s.scene.boxes) {
    line("box = %.17g %.17g %.17g %.17g %.17g%s", bx.x_min, bx.x_max, bx.y_min, bx.y_max, bx.height,
         bx.mapped ? "" : " unmapped");
  }
  for (const auto& cy : s.scene.cylinders) {
    line("cylinder = %.17g %.17g %.17g %.17g%s", cy.cx, cy.cy, cy.radius, cy.height,
         cy.mapped ? "" : " unmapped");
  }
  return out;
}

}  // namespace groundnav
