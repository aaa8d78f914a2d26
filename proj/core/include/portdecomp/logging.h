#pragma once

#include <string_view>

namespace portdecomp {

// Diagnostics go to standard error only. The level is read once from the
// DECOMP_OPT_LOG environment variable (off | info | debug, default off).
void InitLoggingFromEnv();

void LogInfo(std::string_view message);
void LogDebug(std::string_view message);
void LogWarn(std::string_view message);

}  // namespace portdecomp
