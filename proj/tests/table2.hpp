// Copyright 2026 The brightkit Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace bktest {

/// Published default-setting leaderboard: mAP and rank on the long-tailed
/// benchmark (a) and on the balanced one (b).
struct Table2Row {
  std::string model;
  double map_a;
  int rank_a;
  double map_b;
  int rank_b;
  int delta;
};

inline const std::vector<Table2Row>& table2() {
  static const std::vector<Table2Row> rows = {
      {"DP-HOI", 36.56, 1, 40.85, 4, -3}, {"RLIPv2", 35.46, 2, 41.61, 3, -1},
      {"PViC", 34.69, 3, 43.73, 1, 2},    {"HOICLIP", 34.56, 4, 39.14, 5, -1},
      {"GEN-VLKT", 33.61, 5, 38.02, 6, -1}, {"UPT", 31.65, 6, 42.34, 2, 4},
      {"CQL", 31.58, 7, 33.59, 9, -2},    {"CDN", 31.36, 8, 35.24, 7, 1},
      {"QPIC", 29.11, 9, 34.00, 8, 1},
  };
  return rows;
}

}  // namespace bktest
