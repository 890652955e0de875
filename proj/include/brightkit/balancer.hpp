// Copyright 2026 The brightkit Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Class-aware under-sampling of multi-instance images.
//
// balance() alternates an add stage (tail classes first) and a remove stage
// (head classes first) for a fixed number of epochs, then trims individual
// annotations of any class still above the target. Classes whose pool supply
// runs out stop early and are reported as deficits.
//
// Random stream order, which together with the seed fixes the output:
//   per epoch: add stage, tail->head, one shuffle of the candidate images of
//   every class below target; remove stage (all but the last epoch),
//   head->tail, one shuffle for every class above target; then trimming,
//   head->tail, one shuffle of the annotations of every over-full class.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "brightkit/annotation.hpp"
#include "brightkit/random.hpp"
#include "brightkit/stats.hpp"

namespace brightkit {

struct BalanceConfig {
  std::size_t target = 10;   ///< instances per class (L)
  std::size_t top_k = 351;   ///< number of classes selected from the pool (K)
  std::size_t epochs = 20;   ///< add/remove rounds (N)
  std::uint64_t seed = 0;

  void validate() const {
    if (target < 1) throw DataError("balance: target L must be >= 1");
    if (top_k < 1) throw DataError("balance: top-k K must be >= 1");
    if (epochs < 1) throw DataError("balance: epochs N must be >= 1");
  }
};

struct BalanceResult {
  Dataset balanced;
  /// class_id -> missing instances, only for classes short of the target.
  std::map<ClassId, std::size_t> deficits;
  /// Annotations deleted by the final trimming pass.
  std::size_t removed_annotations = 0;
  /// Images that lost at least one annotation to trimming.
  std::size_t trimmed_images = 0;
  /// Annotations of classes outside the balanced set, dropped from the
  /// balanced images.
  std::size_t dropped_unselected = 0;
  /// Pool images not placed in the balanced set.
  Dataset remainder;
};

namespace detail {

inline void check_class_subset(const Dataset& pool, const Vocabulary& classes) {
  if (classes.empty()) throw DataError("balance: empty class set");
  for (const HoiClass& c : classes.classes()) {
    const HoiClass* known = pool.vocabulary().find(c.class_id);
    if (known == nullptr || !(*known == c)) {
      throw DataError("balance: class " + std::to_string(c.class_id) +
                      " is not part of the pool vocabulary");
    }
  }
}

}  // namespace detail

inline BalanceResult balance(const Dataset& pool, const Vocabulary& classes,
                             const BalanceConfig& cfg) {
  cfg.validate();
  detail::check_class_subset(pool, classes);

  // Head -> tail order by pool supply.
  std::vector<ClassId> order;
  for (const HoiClass& c : classes.classes()) order.push_back(c.class_id);
  std::sort(order.begin(), order.end(), [&](ClassId a, ClassId b) {
    const std::size_t ca = pool.count(a), cb = pool.count(b);
    return ca != cb ? ca > cb : a < b;
  });
  std::unordered_map<ClassId, std::size_t> slot;
  for (std::size_t i = 0; i < order.size(); ++i) slot[order[i]] = i;

  const auto& images = pool.images();
  const std::size_t n_classes = order.size();

  // Per image: (class slot, multiplicity) of selected classes.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> image_classes(images.size());
  std::vector<std::vector<std::size_t>> candidates(n_classes);
  for (std::size_t i = 0; i < images.size(); ++i) {
    std::map<std::size_t, std::size_t> mult;
    for (const HoiInstance& h : images[i].instances) {
      auto it = slot.find(h.class_id);
      if (it != slot.end()) ++mult[it->second];
    }
    for (const auto& [s, m] : mult) {
      image_classes[i].emplace_back(s, m);
      candidates[s].push_back(i);
    }
  }

  std::vector<char> member(images.size(), 0);
  std::vector<std::size_t> count(n_classes, 0);
  auto add = [&](std::size_t i) {
    member[i] = 1;
    for (const auto& [s, m] : image_classes[i]) count[s] += m;
  };
  auto remove = [&](std::size_t i) {
    member[i] = 0;
    for (const auto& [s, m] : image_classes[i]) count[s] -= m;
  };

  Rng rng(cfg.seed);
  const std::size_t L = cfg.target;
  std::vector<std::size_t> draw;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t s = n_classes; s-- > 0;) {
      if (count[s] >= L) continue;
      draw = candidates[s];
      rng.shuffle(std::span<std::size_t>(draw));
      // Sampling without replacement; an exhausted draw leaves a deficit.
      for (std::size_t i : draw) {
        if (count[s] >= L) break;
        if (!member[i]) add(i);
      }
    }
    if (epoch == cfg.epochs) break;
    for (std::size_t s = 0; s < n_classes; ++s) {
      if (count[s] <= L) continue;
      draw = candidates[s];
      rng.shuffle(std::span<std::size_t>(draw));
      for (std::size_t i : draw) {
        if (count[s] <= L) break;
        if (member[i]) remove(i);
      }
    }
  }

  // Trim annotations of over-full classes down to exactly L.
  std::vector<std::vector<char>> keep(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (member[i]) keep[i].assign(images[i].instances.size(), 1);
  }
  BalanceResult result;
  std::vector<char> trimmed(images.size(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> occurrences;
  for (std::size_t s = 0; s < n_classes; ++s) {
    if (count[s] <= L) continue;
    occurrences.clear();
    for (std::size_t i : candidates[s]) {
      if (!member[i]) continue;
      for (std::size_t k = 0; k < images[i].instances.size(); ++k) {
        if (images[i].instances[k].class_id == order[s]) occurrences.emplace_back(i, k);
      }
    }
    rng.shuffle(std::span<std::pair<std::size_t, std::size_t>>(occurrences));
    const std::size_t excess = count[s] - L;
    for (std::size_t e = 0; e < excess; ++e) {
      keep[occurrences[e].first][occurrences[e].second] = 0;
      trimmed[occurrences[e].first] = 1;
    }
    result.removed_annotations += excess;
    count[s] = L;
  }

  std::vector<ImageRecord> balanced, rest;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!member[i]) {
      rest.push_back(images[i]);
      continue;
    }
    ImageRecord img = images[i];
    img.instances.clear();
    for (std::size_t k = 0; k < images[i].instances.size(); ++k) {
      const HoiInstance& h = images[i].instances[k];
      if (!slot.contains(h.class_id)) {
        ++result.dropped_unselected;
      } else if (keep[i][k]) {
        img.instances.push_back(h);
      }
    }
    result.trimmed_images += trimmed[i];
    balanced.push_back(std::move(img));
  }
  for (std::size_t s = 0; s < n_classes; ++s) {
    if (count[s] < L) result.deficits[order[s]] = L - count[s];
  }
  result.balanced = Dataset(pool.vocabulary_ptr(), std::move(balanced), pool.vocabulary_ref());
  result.remainder = Dataset(pool.vocabulary_ptr(), std::move(rest), pool.vocabulary_ref());
  return result;
}

// ---------------------------------------------------------------------------

struct SplitAudit {
  std::size_t test_removed_annotations = 0;
  std::size_t test_trimmed_images = 0;
  std::size_t test_dropped_unselected = 0;
  std::size_t train_removed_annotations = 0;
  std::size_t train_trimmed_images = 0;
  std::size_t train_dropped_unselected = 0;
  /// Classes the test pass could not fill from real images.
  std::map<ClassId, std::size_t> test_deficits;
};

struct SplitResult {
  Dataset test;
  Dataset train;
  std::map<ClassId, std::size_t> train_deficits;
  SplitAudit audit;
  /// Images used by neither split.
  Dataset remainder;
};

/// Test split first, from real images only; the train split is then
/// balanced from whatever the test pass left over.
inline SplitResult build_splits(const Dataset& total, const Vocabulary& classes,
                                const BalanceConfig& test_cfg,
                                const BalanceConfig& train_cfg) {
  for (const ImageRecord& img : total.images()) {
    for (const HoiInstance& h : img.instances) {
      if (h.provenance != Provenance::real) {
        throw DataError("build_splits: image '" + img.image_id +
                        "' carries non-real annotations; the split pool must be real data");
      }
    }
  }
  BalanceResult test = balance(total, classes, test_cfg);
  BalanceResult train = balance(test.remainder, classes, train_cfg);
  SplitResult out;
  out.audit.test_removed_annotations = test.removed_annotations;
  out.audit.test_trimmed_images = test.trimmed_images;
  out.audit.test_dropped_unselected = test.dropped_unselected;
  out.audit.test_deficits = test.deficits;
  out.audit.train_removed_annotations = train.removed_annotations;
  out.audit.train_trimmed_images = train.trimmed_images;
  out.audit.train_dropped_unselected = train.dropped_unselected;
  out.test = std::move(test.balanced);
  out.train = std::move(train.balanced);
  out.train_deficits = std::move(train.deficits);
  out.remainder = std::move(train.remainder);
  return out;
}

/// Merges augmented images into `train` so each deficit class gains exactly
/// its missing count. Augmented images are consumed in file order; an image
/// is taken when it still contributes to an open deficit, and its instances
/// beyond the open amount are dropped.
inline Dataset fill_deficits(const Dataset& train,
                             const std::map<ClassId, std::size_t>& deficits,
                             const Dataset& augmented) {
  if (deficits.empty()) return train;
  for (const ImageRecord& img : augmented.images()) {
    for (const HoiInstance& h : img.instances) {
      if (h.provenance == Provenance::real) {
        throw DataError("fill_deficits: augmented image '" + img.image_id +
                        "' carries a real-provenance annotation");
      }
      if (!deficits.contains(h.class_id)) {
        throw DataError("fill_deficits: augmented image '" + img.image_id +
                        "' annotates class " + std::to_string(h.class_id) +
                        " which has no deficit");
      }
      if (!train.vocabulary().contains(h.class_id)) {
        throw DataError("fill_deficits: class " + std::to_string(h.class_id) +
                        " is outside the train vocabulary");
      }
    }
  }
  std::map<ClassId, std::size_t> open = deficits;
  std::vector<ImageRecord> images = train.images();
  for (const ImageRecord& img : augmented.images()) {
    ImageRecord taken = img;
    taken.instances.clear();
    for (const HoiInstance& h : img.instances) {
      std::size_t& need = open[h.class_id];
      if (need > 0) {
        taken.instances.push_back(h);
        --need;
      }
    }
    if (!taken.instances.empty()) images.push_back(std::move(taken));
  }
  std::string missing;
  for (const auto& [c, need] : open) {
    if (need > 0) {
      missing += (missing.empty() ? "" : ", ") + std::to_string(c) + " (" +
                 std::to_string(need) + ")";
    }
  }
  if (!missing.empty()) {
    throw DataError("fill_deficits: augmented data insufficient for classes " + missing);
  }
  return Dataset(train.vocabulary_ptr(), std::move(images), train.vocabulary_ref());
}

}  // namespace brightkit
