#pragma once

#include <memory>

namespace spdlog {
class logger;
}

namespace sscl {

// Shared stderr logger. Verbosity comes from SSCL_LOG (quiet|info|debug);
// the default is quiet, which still lets warnings through.
std::shared_ptr<spdlog::logger> logger();

// Re-reads SSCL_LOG. Returns false if the value is not recognised.
bool configure_logging_from_env();

}  // namespace sscl
