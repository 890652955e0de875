// Copyright 2026 The brightkit Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "brightkit/annotation.hpp"

namespace brightkit::stats {

/// Per-class instance counts for one dataset, covering every vocabulary
/// class (zero-count classes included in `counts`).
struct ClassDistribution {
  std::map<ClassId, std::size_t> counts;
  std::size_t total_instances = 0;
  std::size_t max_count = 0;
  /// Smallest count among classes with at least one instance, or among all
  /// classes when built with include_zero.
  std::size_t min_count = 0;
  std::size_t nonzero_classes = 0;
  bool include_zero = false;
};

inline ClassDistribution distribution(const Dataset& d, bool include_zero = false) {
  ClassDistribution out;
  out.include_zero = include_zero;
  for (const HoiClass& c : d.vocabulary().classes()) out.counts[c.class_id] = d.count(c.class_id);
  out.total_instances = d.total_instances();
  std::optional<std::size_t> lo;
  for (const auto& [id, n] : out.counts) {
    out.max_count = std::max(out.max_count, n);
    if (n > 0) ++out.nonzero_classes;
    if (n == 0 && !include_zero) continue;
    lo = lo ? std::min(*lo, n) : n;
  }
  out.min_count = lo.value_or(0);
  return out;
}

/// Median of the per-class counts; when `nonzero_only` is set, classes with
/// no instances are left out. Even-sized sets average the middle pair.
inline double median_count(const ClassDistribution& dist, bool nonzero_only = true) {
  std::vector<std::size_t> v;
  for (const auto& [id, n] : dist.counts) {
    if (n > 0 || !nonzero_only) v.push_back(n);
  }
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? double(v[m]) : (double(v[m - 1]) + double(v[m])) / 2.0;
}

/// Class ids ordered head to tail: descending count, ascending id on ties.
using SortedClassList = std::vector<ClassId>;

inline SortedClassList sorted_classes(const Dataset& d) {
  SortedClassList ids;
  ids.reserve(d.vocabulary().size());
  for (const HoiClass& c : d.vocabulary().classes()) ids.push_back(c.class_id);
  std::sort(ids.begin(), ids.end(), [&](ClassId a, ClassId b) {
    const std::size_t ca = d.count(a), cb = d.count(b);
    return ca != cb ? ca > cb : a < b;
  });
  return ids;
}

/// The first k entries of a head-to-tail list, as a sub-vocabulary of `vocab`.
inline Vocabulary top_k(const SortedClassList& sorted, std::size_t k, const Vocabulary& vocab) {
  if (k < 1 || k > sorted.size()) {
    throw DataError("top-k: k=" + std::to_string(k) + " outside [1, " +
                    std::to_string(sorted.size()) + "]");
  }
  std::set<ClassId> ids(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k));
  return vocab.subset(ids);
}

struct RatioRow {
  ClassId class_id = 0;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  /// Empty when test_count is zero.
  std::optional<double> ratio;
};

inline std::vector<RatioRow> ratio_report(const Dataset& train, const Dataset& test) {
  if (!(train.vocabulary() == test.vocabulary())) {
    throw DataError("ratio report: train and test use different vocabularies");
  }
  std::vector<RatioRow> rows;
  for (const HoiClass& c : train.vocabulary().classes()) {
    RatioRow r{c.class_id, train.count(c.class_id), test.count(c.class_id), std::nullopt};
    if (r.test_count > 0) r.ratio = double(r.train_count) / double(r.test_count);
    rows.push_back(r);
  }
  return rows;
}

// Serialization -------------------------------------------------------------

inline json to_json(const ClassDistribution& d) {
  json counts = json::object();
  for (const auto& [id, n] : d.counts) counts[std::to_string(id)] = n;
  return {{"total_instances", d.total_instances},
          {"max_count", d.max_count},
          {"min_count", d.min_count},
          {"min_includes_zero", d.include_zero},
          {"nonzero_classes", d.nonzero_classes},
          {"median_count", median_count(d, !d.include_zero)},
          {"counts", std::move(counts)}};
}

inline json to_json(const std::vector<RatioRow>& rows) {
  json out = json::array();
  for (const RatioRow& r : rows) {
    out.push_back({{"class_id", r.class_id},
                   {"train_count", r.train_count},
                   {"test_count", r.test_count},
                   {"ratio", r.ratio ? json(*r.ratio) : json("undefined")}});
  }
  return out;
}

/// One row per vocabulary class: class_id,verb,object,count[,test_count,ratio].
inline std::string to_csv(const Vocabulary& vocab, const ClassDistribution& dist,
                          const std::vector<RatioRow>* ratios = nullptr) {
  std::ostringstream out;
  out << "class_id,verb,object,count";
  if (ratios) out << ",test_count,ratio";
  out << "\n";
  std::map<ClassId, const RatioRow*> by_id;
  if (ratios) {
    for (const RatioRow& r : *ratios) by_id[r.class_id] = &r;
  }
  for (const HoiClass& c : vocab.classes()) {
    out << c.class_id << ',' << c.verb_name << ',' << c.object_name << ','
        << dist.counts.at(c.class_id);
    if (ratios) {
      const RatioRow* r = by_id.at(c.class_id);
      out << ',' << r->test_count << ',';
      if (r->ratio) {
        out << json(*r->ratio).dump();
      } else {
        out << "undefined";
      }
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace brightkit::stats
