// Copyright 2026 The brightkit Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace brightkit {

inline constexpr const char* kVersion = "0.3.0";

}  // namespace brightkit
