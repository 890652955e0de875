// Copyright 2026 The brightkit Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Fixture builders and brute-force oracles shared by the unit and acceptance
// tests. Oracles deliberately avoid the library's own helpers.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include "brightkit/annotation.hpp"
#include "brightkit/evaluator.hpp"

namespace bktest {

using namespace brightkit;

/// Vocabulary of `n` classes; class i gets verb (i-1) % verbs + 1 and object
/// (i-1) / verbs + 1, so ids are unique as long as n <= verbs * objects.
inline VocabularyPtr grid_vocab(int n, int verbs = 4) {
  std::vector<HoiClass> classes;
  for (int i = 1; i <= n; ++i) {
    const int v = (i - 1) % verbs + 1, o = (i - 1) / verbs + 1;
    classes.push_back({i, v, o, "verb" + std::to_string(v), "object" + std::to_string(o)});
  }
  return std::make_shared<const Vocabulary>(std::move(classes));
}

inline VocabularyPtr vocab_of(std::vector<HoiClass> classes) {
  return std::make_shared<const Vocabulary>(std::move(classes));
}

inline HoiInstance inst(ClassId c, Provenance p = Provenance::real, double shift = 0) {
  return {{10 + shift, 10, 50 + shift, 90}, {60 + shift, 40, 90 + shift, 80}, c, p};
}

inline ImageRecord image(const std::string& id, const std::vector<ClassId>& classes,
                         Provenance p = Provenance::real) {
  ImageRecord img{id, id + ".jpg", 640, 480, {}};
  double shift = 0;
  for (ClassId c : classes) img.instances.push_back(inst(c, p, shift++));
  return img;
}

/// Random multi-label pool: every image carries 1..max_classes distinct
/// classes, each with 1..max_mult instances. Class frequencies are skewed
/// toward low ids to mimic a long tail.
inline Dataset random_pool(std::uint64_t seed, const VocabularyPtr& vocab, int n_images,
                           int max_classes = 4, int max_mult = 2, const std::string& prefix = "img") {
  std::mt19937_64 gen(seed);
  const int k = static_cast<int>(vocab->size());
  std::vector<double> weights;
  for (int i = 0; i < k; ++i) weights.push_back(1.0 / (1.0 + i));
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::uniform_int_distribution<int> n_cls(1, std::min(max_classes, k)), mult(1, max_mult);
  std::vector<ImageRecord> images;
  for (int i = 0; i < n_images; ++i) {
    std::set<int> chosen;
    const int want = n_cls(gen);
    while (static_cast<int>(chosen.size()) < want) chosen.insert(pick(gen));
    std::vector<ClassId> cls;
    for (int c : chosen) {
      for (int m = mult(gen); m > 0; --m) cls.push_back(vocab->classes()[c].class_id);
    }
    images.push_back(image(prefix + std::to_string(i), cls));
  }
  return Dataset(vocab, std::move(images));
}

/// Instance count of class `c`, by linear scan.
inline std::size_t recount(const Dataset& d, ClassId c) {
  std::size_t n = 0;
  for (const ImageRecord& img : d.images()) {
    for (const HoiInstance& h : img.instances) n += h.class_id == c;
  }
  return n;
}

// ---------------------------------------------------------------------------
// AP oracle
// ---------------------------------------------------------------------------

inline double oracle_iou(const BBox& a, const BBox& b) {
  const double w = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double h = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const double inter = w * h;
  const double uni = (a.x2 - a.x1) * (a.y2 - a.y1) + (b.x2 - b.x1) * (b.y2 - b.y1) - inter;
  return uni > 0 ? inter / uni : 0.0;
}

/// Point-by-point PR curve: at every true positive, recall rises by 1/num_gt
/// and contributes the best precision reached at any later-or-equal rank.
inline double oracle_ap_from_flags(const std::vector<bool>& tp, std::size_t num_gt) {
  if (num_gt == 0) return 0.0;
  const std::size_t n = tp.size();
  std::vector<double> precision(n);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    hits += tp[i] ? 1 : 0;
    precision[i] = double(hits) / double(i + 1);
  }
  double sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!tp[i]) continue;
    double best = 0;
    for (std::size_t j = i; j < n; ++j) best = std::max(best, precision[j]);
    sum += best;
  }
  return sum / double(num_gt);
}

/// Full oracle: sorts, matches and integrates without the library.
inline double oracle_class_ap(const std::vector<eval::Prediction>& preds, const Dataset& gt,
                              ClassId c, double thr = 0.5) {
  struct G {
    std::string image;
    BBox h, o;
    bool used = false;
  };
  std::vector<G> gts;
  for (const ImageRecord& img : gt.images()) {
    for (const HoiInstance& x : img.instances) {
      if (x.class_id == c) gts.push_back({img.image_id, x.human_box, x.object_box});
    }
  }
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].class_id == c) order.emplace_back(-preds[i].score, i);
  }
  std::sort(order.begin(), order.end());
  std::vector<bool> tp;
  for (const auto& [neg, i] : order) {
    const eval::Prediction& p = preds[i];
    G* best = nullptr;
    double best_ov = 0;
    for (G& g : gts) {
      if (g.used || g.image != p.image_id) continue;
      const double ov = std::min(oracle_iou(p.human_box, g.h), oracle_iou(p.object_box, g.o));
      if (ov >= thr && (best == nullptr || ov > best_ov)) {
        best = &g;
        best_ov = ov;
      }
    }
    if (best) best->used = true;
    tp.push_back(best != nullptr);
  }
  return oracle_ap_from_flags(tp, gts.size());
}

struct ApCase {
  Dataset gt;
  std::vector<eval::Prediction> preds;
};

/// Random single-class matching problem: up to `max_gt` ground-truth pairs
/// over three images and up to `max_preds` predictions. Predictions are
/// jittered copies of ground truth (some near the IoU threshold), duplicates,
/// or strays; scores come from a coarse grid so ties are common.
inline ApCase random_ap_case(std::uint64_t seed, int max_preds = 20, int max_gt = 10) {
  std::mt19937_64 gen(seed);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); };
  auto vocab = grid_vocab(2);
  const int n_gt = uni(0, max_gt), n_pred = uni(0, max_preds);
  std::vector<ImageRecord> images;
  for (int i = 0; i < 3; ++i) images.push_back({"im" + std::to_string(i), "im.jpg", 400, 400, {}});
  for (int g = 0; g < n_gt; ++g) {
    const double x = uni(0, 250), y = uni(0, 250);
    images[uni(0, 2)].instances.push_back(
        {{x, y, x + uni(20, 100), y + uni(20, 100)}, {x + 10, y + 20, x + 10 + uni(20, 80), y + 20 + uni(20, 80)},
         uni(1, 2), Provenance::real});
  }
  Dataset gt(vocab, images);
  std::vector<const HoiInstance*> all;
  std::vector<std::string> owner;
  for (const ImageRecord& img : gt.images()) {
    for (const HoiInstance& h : img.instances) {
      all.push_back(&h);
      owner.push_back(img.image_id);
    }
  }
  std::vector<eval::Prediction> preds;
  for (int p = 0; p < n_pred; ++p) {
    eval::Prediction pr;
    pr.class_id = uni(1, 2);
    pr.score = uni(0, 10) / 10.0;
    if (!all.empty() && uni(0, 3) > 0) {
      const std::size_t k = std::size_t(uni(0, int(all.size()) - 1));
      const double j = std::vector<double>{0, 0, 2, 8, 15, 30}[std::size_t(uni(0, 5))];
      pr.image_id = owner[k];
      pr.human_box = {all[k]->human_box.x1 + j, all[k]->human_box.y1, all[k]->human_box.x2 + j,
                      all[k]->human_box.y2};
      pr.object_box = {all[k]->object_box.x1, all[k]->object_box.y1 - j / 2, all[k]->object_box.x2,
                       all[k]->object_box.y2 - j / 2};
    } else {
      const double x = uni(0, 300), y = uni(0, 300);
      pr.image_id = "im" + std::to_string(uni(0, 2));
      pr.human_box = {x, y, x + 50, y + 60};
      pr.object_box = {x + 5, y + 5, x + 45, y + 70};
    }
    preds.push_back(pr);
  }
  return {gt, preds};
}

/// Two classes ranked by the same six scores. Class 1 has 10 ground-truth
/// pairs and six hits; class 2 has 2 pairs, hit at ranks 0 and 3.
inline ApCase flip_scenario() {
  auto vocab = grid_vocab(2);
  ImageRecord many{"many", "many.jpg", 1000, 1000, {}}, less{"less", "less.jpg", 1000, 1000, {}};
  for (int i = 0; i < 10; ++i) {
    const double x = 90.0 * i;
    many.instances.push_back({{x, 0, x + 40, 80}, {x + 40, 40, x + 80, 80}, 1, Provenance::real});
  }
  for (int i = 0; i < 2; ++i) {
    const double x = 300.0 * i;
    less.instances.push_back({{x, 0, x + 40, 80}, {x + 40, 40, x + 80, 80}, 2, Provenance::real});
  }
  ImageRecord empty{"empty", "empty.jpg", 1000, 1000, {}};
  Dataset gt(vocab, {many, less, empty});
  const std::vector<double> scores{0.9, 0.8, 0.7, 0.6, 0.5, 0.4};
  std::vector<eval::Prediction> preds;
  for (std::size_t r = 0; r < scores.size(); ++r) {
    const HoiInstance& m = many.instances[r];
    preds.push_back({"many", m.human_box, m.object_box, 1, scores[r]});
    if (r == 0 || r == 3) {
      const HoiInstance& l = less.instances[r == 0 ? 0 : 1];
      preds.push_back({"less", l.human_box, l.object_box, 2, scores[r]});
    } else {
      preds.push_back({"empty", {0, 0, 10, 10}, {10, 10, 20, 20}, 2, scores[r]});
    }
  }
  return {gt, preds};
}

/// Unique scratch directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("brightkit-" + tag + "-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace bktest
