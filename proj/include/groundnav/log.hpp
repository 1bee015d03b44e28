#pragma once

namespace groundnav {

/// Sets the spdlog level from GROUNDNAV_LOG (error|warn|info|debug; default warn).
void init_logging();

}  // namespace groundnav
