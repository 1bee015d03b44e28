#include <cstdlib>
#include <string_view>

#include <spdlog/spdlog.h>

#include "groundnav/log.hpp"

namespace groundnav {

void init_logging() {
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  const char* env = std::getenv("GROUNDNAV_LOG");
  if (env == nullptr) return;
  const std::string_view v(env);
  if (v == "error") spdlog::set_level(spdlog::level::err);
  else if (v == "warn") spdlog::set_level(spdlog::level::warn);
  else if (v == "info") spdlog::set_level(spdlog::level::info);
  else if (v == "debug") spdlog::set_level(spdlog::level::debug);
  else spdlog::warn("ignoring unknown GROUNDNAV_LOG level '{}'", v);
}

}  // namespace groundnav
