// Copyright 2026 The brightkit Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "brightkit/annotation.hpp"
#include "brightkit/balancer.hpp"

namespace brightkit::zeroshot {

/// Unseen compositions: classes of `universe` outside `seen` whose verb and
/// object both occur somewhere in `seen`. Returned in universe order.
inline std::vector<HoiClass> enumerate_candidates(const Vocabulary& seen,
                                                  const Vocabulary& universe) {
  if (!universe.includes(seen)) {
    throw DataError("zero-shot: the seen classes are not a subset of the universe");
  }
  std::vector<HoiClass> out;
  for (const HoiClass& c : universe.classes()) {
    if (seen.contains(c.class_id)) continue;
    if (seen.verb_ids().contains(c.verb_id) && seen.object_ids().contains(c.object_id)) {
      out.push_back(c);
    }
  }
  return out;
}

struct ZeroShotPlan {
  std::vector<HoiClass> candidate_classes;
  std::size_t instances_per_class = 10;
  /// Upper bound on the number of classes kept.
  std::size_t class_budget = 107;
  /// Real images not used by the train or test splits.
  Dataset source_pool;
};

struct ExcludedCandidate {
  ClassId class_id = 0;
  std::size_t supply = 0;
};

struct ZeroShotResult {
  Dataset split;
  /// Kept classes, by descending supply then class_id.
  std::vector<ClassId> classes;
  /// Candidates without enough real supply.
  std::vector<ExcludedCandidate> unsatisfiable;
  /// Satisfiable candidates cut by the class budget.
  std::vector<ExcludedCandidate> over_budget;
  std::vector<std::string> warnings;
};

/// Throws when any of `used` shares an image with the plan's pool.
inline void check_disjoint(const Dataset& pool, const std::vector<const Dataset*>& used) {
  const std::set<std::string> ids = pool.image_ids();
  for (const Dataset* d : used) {
    for (const ImageRecord& img : d->images()) {
      if (ids.contains(img.image_id)) {
        throw DataError("zero-shot: pool image '" + img.image_id +
                        "' is already used by another split");
      }
    }
  }
}

/// Balances the pool over the best-supplied satisfiable candidates.
/// A shortfall against the class budget is reported in `warnings`.
inline ZeroShotResult build_zeroshot_split(const ZeroShotPlan& plan, const BalanceConfig& cfg) {
  const Dataset& pool = plan.source_pool;
  if (plan.instances_per_class < 1) throw DataError("zero-shot: per-class target must be >= 1");
  for (const ImageRecord& img : pool.images()) {
    for (const HoiInstance& h : img.instances) {
      if (h.provenance != Provenance::real) {
        throw DataError("zero-shot: pool image '" + img.image_id + "' is not real data");
      }
    }
  }

  ZeroShotResult out;
  std::vector<ExcludedCandidate> satisfiable;
  for (const HoiClass& c : plan.candidate_classes) {
    const std::size_t supply = pool.count(c.class_id);
    if (supply >= plan.instances_per_class) {
      satisfiable.push_back({c.class_id, supply});
    } else {
      out.unsatisfiable.push_back({c.class_id, supply});
      out.warnings.push_back("class " + std::to_string(c.class_id) + " has only " +
                             std::to_string(supply) + " real instances");
    }
  }
  std::stable_sort(satisfiable.begin(), satisfiable.end(),
                   [](const ExcludedCandidate& a, const ExcludedCandidate& b) {
                     return a.supply != b.supply ? a.supply > b.supply : a.class_id < b.class_id;
                   });
  if (satisfiable.size() > plan.class_budget) {
    out.over_budget.assign(satisfiable.begin() + static_cast<std::ptrdiff_t>(plan.class_budget),
                           satisfiable.end());
    satisfiable.resize(plan.class_budget);
  }
  if (satisfiable.size() < plan.class_budget) {
    out.warnings.push_back("only " + std::to_string(satisfiable.size()) + " of " +
                           std::to_string(plan.class_budget) +
                           " requested classes are satisfiable");
  }
  for (const std::string& w : out.warnings) logger().warn("zero-shot: {}", w);
  for (const ExcludedCandidate& c : satisfiable) out.classes.push_back(c.class_id);
  if (out.classes.empty()) {
    out.split = Dataset(pool.vocabulary_ptr(), {}, pool.vocabulary_ref());
    return out;
  }

  BalanceConfig bc = cfg;
  bc.target = plan.instances_per_class;
  bc.top_k = out.classes.size();
  const Vocabulary selected =
      pool.vocabulary().subset(std::set<ClassId>(out.classes.begin(), out.classes.end()));
  BalanceResult r = balance(pool, selected, bc);
  // Every selected class has supply >= target, so balance leaves no deficit.
  out.split = std::move(r.balanced);
  return out;
}

}  // namespace brightkit::zeroshot
