// Copyright 2026 The brightkit Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <memory>
#include <string>

namespace brightkit {

/// Shared stderr logger. Level comes from BRIGHT_KIT_LOG
/// (trace|debug|info|warn|error|off), defaulting to warn.
inline spdlog::logger& logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto l = std::make_shared<spdlog::logger>(
        "brightkit", std::make_shared<spdlog::sinks::stderr_color_sink_mt>());
    l->set_pattern("[%l] %v");
    spdlog::level::level_enum level = spdlog::level::warn;
    if (const char* env = std::getenv("BRIGHT_KIT_LOG"); env != nullptr) {
      level = spdlog::level::from_str(env);
    }
    l->set_level(level);
    return l;
  }();
  return *instance;
}

}  // namespace brightkit
