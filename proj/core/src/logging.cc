#include "portdecomp/logging.h"

#include <cstdlib>
#include <memory>
#include <mutex>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace portdecomp {
namespace {

std::shared_ptr<spdlog::logger> Logger() {
  static std::once_flag once;
  static std::shared_ptr<spdlog::logger> logger;
  std::call_once(once, [] {
    logger = spdlog::stderr_logger_mt("portdecomp");
    logger->set_pattern("[%l] %v");
    logger->set_level(spdlog::level::off);
    const char* env = std::getenv("DECOMP_OPT_LOG");
    const std::string level = env == nullptr ? "off" : env;
    if (level == "info") {
      logger->set_level(spdlog::level::info);
    } else if (level == "debug") {
      logger->set_level(spdlog::level::debug);
    }
  });
  return logger;
}

}  // namespace

void InitLoggingFromEnv() { Logger(); }

void LogInfo(std::string_view message) { Logger()->info("{}", message); }
void LogDebug(std::string_view message) { Logger()->debug("{}", message); }
void LogWarn(std::string_view message) {
  // Warnings are shown at every level except off.
  Logger()->warn("{}", message);
}

}  // namespace portdecomp
