#include "sscl/log.hpp"

#include <cstdlib>
#include <mutex>
#include <string_view>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace sscl {

namespace {

std::once_flag g_init;
std::shared_ptr<spdlog::logger> g_logger;

spdlog::level::level_enum level_from_env(bool* ok) {
  const char* env = std::getenv("SSCL_LOG");
  *ok = true;
  if (env == nullptr) return spdlog::level::warn;
  std::string_view v(env);
  if (v == "quiet" || v.empty()) return spdlog::level::warn;
  if (v == "info") return spdlog::level::info;
  if (v == "debug") return spdlog::level::debug;
  *ok = false;
  return spdlog::level::warn;
}

}  // namespace

std::shared_ptr<spdlog::logger> logger() {
  std::call_once(g_init, [] {
    g_logger = spdlog::stderr_color_mt("sscl");
    g_logger->set_pattern("[%l] %v");
    bool ok = true;
    g_logger->set_level(level_from_env(&ok));
  });
  return g_logger;
}

bool configure_logging_from_env() {
  bool ok = true;
  logger()->set_level(level_from_env(&ok));
  return ok;
}

}  // namespace sscl
