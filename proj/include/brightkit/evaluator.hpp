// Copyright 2026 The brightkit Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "brightkit/annotation.hpp"

namespace brightkit::eval {

struct Prediction {
  std::string image_id;
  BBox human_box;
  BBox object_box;
  ClassId class_id = 0;
  double score = 0;
};

enum class ApMethod { all_point, eleven_point };

/// A prediction matches a ground-truth pair when both the human-box and the
/// object-box IoU reach the threshold.
struct MatchConfig {
  double iou_threshold = 0.5;
  ApMethod method = ApMethod::all_point;

  void validate() const {
    if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
      throw DataError("iou threshold must lie in (0, 1)");
    }
  }
};

inline double pair_iou(const BBox& h1, const BBox& o1, const BBox& h2, const BBox& o2) {
  return std::min(iou(h1, h2), iou(o1, o2));
}

/// Per-class outcome of matching and integration.
struct ClassAp {
  ClassId class_id = 0;
  double ap = 0;
  std::size_t num_gt = 0;
  /// Indices into `preds` of this class's predictions, best score first.
  std::vector<std::size_t> ranked;
  /// Parallel to `ranked`: true for a true positive.
  std::vector<bool> is_tp;
  /// Indices into `preds` of the matched predictions, in rank order.
  std::vector<std::size_t> matched_tp;
};

/// Area under the precision-recall curve for a ranked TP/FP sequence.
///
/// all_point: each recall step is weighted by 1/num_gt and takes the running
/// maximum of precision from that rank onward, summed in rank order.
/// eleven_point: mean of the interpolated precision at recall 0, 0.1, ..., 1.
inline double average_precision(const std::vector<bool>& is_tp, std::size_t num_gt,
                                ApMethod method = ApMethod::all_point) {
  if (num_gt == 0) return 0.0;
  const std::size_t n = is_tp.size();
  std::vector<double> precision(n), recall(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    tp += is_tp[i];
    precision[i] = double(tp) / double(i + 1);
    recall[i] = double(tp) / double(num_gt);
  }
  // Monotone envelope from the right.
  std::vector<double> envelope = precision;
  for (std::size_t i = n; i-- > 1;) envelope[i - 1] = std::max(envelope[i - 1], envelope[i]);

  if (method == ApMethod::eleven_point) {
    double sum = 0;
    for (int t = 0; t <= 10; ++t) {
      const double r = t / 10.0;
      double best = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (recall[i] >= r) {
          best = envelope[i];
          break;
        }
      }
      sum += best;
    }
    return sum / 11.0;
  }
  double sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_tp[i]) sum += envelope[i];
  }
  return sum / double(num_gt);
}

/// Ground-truth pairs of one class, grouped by image.
struct GtIndex {
  std::unordered_map<std::string, std::vector<const HoiInstance*>> by_image;
  std::size_t total = 0;
};

inline GtIndex index_gt(const Dataset& gt, ClassId class_id) {
  GtIndex idx;
  for (const ImageRecord& img : gt.images()) {
    for (const HoiInstance& h : img.instances) {
      if (h.class_id == class_id) {
        idx.by_image[img.image_id].push_back(&h);
        ++idx.total;
      }
    }
  }
  return idx;
}

/// Greedy matching in descending score order (ties keep input order). Each
/// prediction takes the unmatched ground truth of its image with the highest
/// pair IoU at or above the threshold; the first such pair wins a tie.
inline ClassAp class_ap(const std::vector<Prediction>& preds, const Dataset& gt,
                        ClassId class_id, const MatchConfig& cfg = {}) {
  cfg.validate();
  ClassAp out;
  out.class_id = class_id;
  const GtIndex idx = index_gt(gt, class_id);
  out.num_gt = idx.total;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i].class_id == class_id) out.ranked.push_back(i);
  }
  std::stable_sort(out.ranked.begin(), out.ranked.end(), [&](std::size_t a, std::size_t b) {
    return preds[a].score > preds[b].score;
  });
  std::unordered_map<std::string, std::vector<bool>> used;
  for (std::size_t i : out.ranked) {
    const Prediction& p = preds[i];
    bool tp = false;
    auto it = idx.by_image.find(p.image_id);
    if (it != idx.by_image.end()) {
      std::vector<bool>& taken = used[p.image_id];
      taken.resize(it->second.size(), false);
      double best = -1;
      std::size_t best_k = 0;
      for (std::size_t k = 0; k < it->second.size(); ++k) {
        if (taken[k]) continue;
        const double ov = pair_iou(p.human_box, p.object_box, it->second[k]->human_box,
                                   it->second[k]->object_box);
        if (ov >= cfg.iou_threshold && ov > best) {
          best = ov;
          best_k = k;
        }
      }
      if (best >= 0) {
        taken[best_k] = true;
        tp = true;
        out.matched_tp.push_back(i);
      }
    }
    out.is_tp.push_back(tp);
  }
  out.ap = average_precision(out.is_tp, out.num_gt, cfg.method);
  return out;
}

// ---------------------------------------------------------------------------
// Distribution statistics
// ---------------------------------------------------------------------------

struct BoxStats {
  double mean = 0;
  double variance = 0;  ///< population variance
  double q1 = 0, median = 0, q3 = 0;
  double lower_fence = 0, upper_fence = 0;
};

/// Inclusive quantile: linear interpolation at position p*(n-1).
inline double quantile_inclusive(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = p * double(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - double(lo)) * (v[hi] - v[lo]);
}

inline BoxStats box_stats(const std::vector<double>& v) {
  BoxStats s;
  if (v.empty()) return s;
  double sum = 0;
  for (double x : v) sum += x;
  s.mean = sum / double(v.size());
  double sq = 0;
  for (double x : v) sq += (x - s.mean) * (x - s.mean);
  s.variance = sq / double(v.size());
  s.q1 = quantile_inclusive(v, 0.25);
  s.median = quantile_inclusive(v, 0.5);
  s.q3 = quantile_inclusive(v, 0.75);
  const double iqr = s.q3 - s.q1;
  s.lower_fence = s.q1 - 1.5 * iqr;
  s.upper_fence = s.q3 + 1.5 * iqr;
  return s;
}

struct EvalReport {
  std::string model;
  std::map<ClassId, double> per_class_ap;
  /// Vocabulary classes without ground truth, left out of the mean.
  std::vector<ClassId> undefined_classes;
  double map = 0;
  BoxStats stats;
  std::vector<ClassId> outliers;
};

/// Aggregates per-class APs. mAP is the plain mean over the given classes.
inline EvalReport report_from_aps(std::map<ClassId, double> aps, std::string model = {}) {
  EvalReport r;
  r.model = std::move(model);
  r.per_class_ap = std::move(aps);
  std::vector<double> v;
  v.reserve(r.per_class_ap.size());
  for (const auto& [id, ap] : r.per_class_ap) v.push_back(ap);
  r.stats = box_stats(v);
  r.map = r.stats.mean;
  for (const auto& [id, ap] : r.per_class_ap) {
    if (ap < r.stats.lower_fence || ap > r.stats.upper_fence) r.outliers.push_back(id);
  }
  return r;
}

inline EvalReport evaluate(const std::vector<Prediction>& preds, const Dataset& gt,
                           const Vocabulary& vocab, const MatchConfig& cfg = {},
                           std::string model = {}) {
  cfg.validate();
  if (gt.total_instances() == 0) throw DataError("evaluate: ground truth is empty");
  std::map<ClassId, double> aps;
  std::vector<ClassId> undefined;
  for (const HoiClass& c : vocab.classes()) {
    if (gt.count(c.class_id) == 0) {
      undefined.push_back(c.class_id);
      continue;
    }
    aps[c.class_id] = class_ap(preds, gt, c.class_id, cfg).ap;
  }
  EvalReport r = report_from_aps(std::move(aps), std::move(model));
  r.undefined_classes = std::move(undefined);
  return r;
}

// ---------------------------------------------------------------------------
// Ranking shift
// ---------------------------------------------------------------------------

struct RankRow {
  std::string model;
  double map_a = 0;
  int rank_a = 0;
  double map_b = 0;
  int rank_b = 0;
  /// rank_a - rank_b; positive means the model moved up under B.
  int delta = 0;
};

/// Ranks by descending mAP, ties by model name. Rows come out in A order.
inline std::vector<RankRow> ranking_shift(const std::map<std::string, double>& map_a,
                                          const std::map<std::string, double>& map_b) {
  if (map_a.size() != map_b.size() ||
      !std::equal(map_a.begin(), map_a.end(), map_b.begin(),
                  [](const auto& x, const auto& y) { return x.first == y.first; })) {
    throw DataError("ranking shift: the two report sets cover different models");
  }
  auto ranks = [](const std::map<std::string, double>& m) {
    std::vector<std::pair<std::string, double>> v(m.begin(), m.end());
    std::stable_sort(v.begin(), v.end(),
                     [](const auto& x, const auto& y) { return x.second > y.second; });
    std::map<std::string, int> r;
    for (std::size_t i = 0; i < v.size(); ++i) r[v[i].first] = int(i) + 1;
    return std::make_pair(v, r);
  };
  const auto [order_a, rank_a] = ranks(map_a);
  const auto [order_b, rank_b] = ranks(map_b);
  std::vector<RankRow> rows;
  for (const auto& [name, value] : order_a) {
    RankRow row{name, value, rank_a.at(name), map_b.at(name), rank_b.at(name), 0};
    row.delta = row.rank_a - row.rank_b;
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<RankRow> ranking_shift(const std::map<std::string, EvalReport>& a,
                                          const std::map<std::string, EvalReport>& b) {
  std::map<std::string, double> ma, mb;
  for (const auto& [k, r] : a) ma[k] = r.map;
  for (const auto& [k, r] : b) mb[k] = r.map;
  return ranking_shift(ma, mb);
}

// ---------------------------------------------------------------------------
// TP-flip perturbation
// ---------------------------------------------------------------------------

enum class FlipTarget { highest, lowest };

struct FlipResult {
  ClassId class_id = 0;
  std::size_t flipped_prediction = 0;  ///< index into preds
  std::size_t flipped_rank = 0;        ///< 0-based position in the ranking
  double original_ap = 0;
  double perturbed_ap = 0;
  double relative_drop = 0;
};

/// Re-scores a class with one matched prediction forced to a false positive.
/// The prediction keeps its rank; all other match decisions stay as they were.
inline FlipResult perturb_tp_flip(const std::vector<Prediction>& preds, const Dataset& gt,
                                  ClassId class_id, const MatchConfig& cfg = {},
                                  FlipTarget target = FlipTarget::highest) {
  const ClassAp base = class_ap(preds, gt, class_id, cfg);
  if (base.matched_tp.empty()) {
    throw DataError("perturb: class " + std::to_string(class_id) + " has no true positive");
  }
  std::vector<std::size_t> tp_ranks;
  for (std::size_t r = 0; r < base.is_tp.size(); ++r) {
    if (base.is_tp[r]) tp_ranks.push_back(r);
  }
  const std::size_t rank = target == FlipTarget::highest ? tp_ranks.front() : tp_ranks.back();
  std::vector<bool> flipped = base.is_tp;
  flipped[rank] = false;
  FlipResult out;
  out.class_id = class_id;
  out.flipped_prediction = base.ranked[rank];
  out.flipped_rank = rank;
  out.original_ap = base.ap;
  out.perturbed_ap = average_precision(flipped, base.num_gt, cfg.method);
  out.relative_drop = (out.original_ap - out.perturbed_ap) / out.original_ap;
  return out;
}

// ---------------------------------------------------------------------------
// I/O
// ---------------------------------------------------------------------------

inline Prediction prediction_from_json(const json& j, const Vocabulary& vocab,
                                       const std::string& where) {
  Prediction p;
  p.image_id = detail::field<std::string>(j, "image_id", where);
  if (!j.contains("human_box") || !j.contains("object_box")) {
    throw DataError(where + ": missing box field");
  }
  p.human_box = detail::parse_box(j["human_box"], where);
  p.object_box = detail::parse_box(j["object_box"], where);
  p.class_id = detail::field<int>(j, "class_id", where);
  p.score = detail::field<double>(j, "score", where);
  if (!std::isfinite(p.score) || p.score < 0.0 || p.score > 1.0) {
    throw DataError(where + ": score must be finite and within [0, 1]");
  }
  if (!vocab.contains(p.class_id)) {
    throw DataError(where + ": unknown class_id " + std::to_string(p.class_id));
  }
  return p;
}

inline json prediction_to_json(const Prediction& p) {
  return {{"image_id", p.image_id},
          {"human_box", detail::box_to_json(p.human_box)},
          {"object_box", detail::box_to_json(p.object_box)},
          {"class_id", p.class_id},
          {"score", p.score}};
}

/// JSON-lines; blank lines are ignored.
inline std::vector<Prediction> parse_predictions(const std::string& text, const Vocabulary& vocab,
                                                 const std::string& source = "predictions") {
  std::vector<Prediction> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(where + ": malformed JSON: " + e.what(), source);
    }
    out.push_back(prediction_from_json(j, vocab, where));
  }
  return out;
}

inline std::vector<Prediction> load_predictions(const std::filesystem::path& path,
                                                const Vocabulary& vocab) {
  return parse_predictions(read_text_file(path), vocab, path.string());
}

inline std::string predictions_to_jsonl(const std::vector<Prediction>& preds) {
  std::string out;
  for (const Prediction& p : preds) out += prediction_to_json(p).dump() + "\n";
  return out;
}

inline json to_json(const EvalReport& r) {
  json aps = json::object();
  for (const auto& [id, ap] : r.per_class_ap) aps[std::to_string(id)] = ap;
  return {{"model", r.model},
          {"map", r.map},
          {"num_classes", r.per_class_ap.size()},
          {"variance", r.stats.variance},
          {"median", r.stats.median},
          {"q1", r.stats.q1},
          {"q3", r.stats.q3},
          {"lower_fence", r.stats.lower_fence},
          {"upper_fence", r.stats.upper_fence},
          {"outliers", r.outliers},
          {"undefined_classes", r.undefined_classes},
          {"per_class_ap", std::move(aps)}};
}

/// Reads a report. A file carrying only {"model", "map"} is accepted and
/// yields a report without per-class data.
inline EvalReport report_from_json(const json& j, const std::string& fallback_model = {}) {
  EvalReport r;
  if (j.contains("per_class_ap") && j["per_class_ap"].is_object() &&
      !j["per_class_ap"].empty()) {
    std::map<ClassId, double> aps;
    for (const auto& [k, v] : j["per_class_ap"].items()) aps[std::stoi(k)] = v.get<double>();
    r = report_from_aps(std::move(aps));
  } else {
    r.map = detail::field<double>(j, "map", "report");
  }
  r.model = j.contains("model") && j["model"].is_string() && !j["model"].get<std::string>().empty()
                ? j["model"].get<std::string>()
                : fallback_model;
  if (j.contains("undefined_classes")) {
    r.undefined_classes = j["undefined_classes"].get<std::vector<ClassId>>();
  }
  return r;
}

inline std::string to_csv(const EvalReport& r, const Vocabulary& vocab) {
  std::ostringstream out;
  out << "class_id,verb,object,ap,outlier\n";
  std::set<ClassId> outliers(r.outliers.begin(), r.outliers.end());
  for (const auto& [id, ap] : r.per_class_ap) {
    const HoiClass* c = vocab.find(id);
    out << id << ',' << (c ? c->verb_name : "") << ',' << (c ? c->object_name : "") << ','
        << json(ap).dump() << ',' << (outliers.contains(id) ? 1 : 0) << "\n";
  }
  return out.str();
}

inline json to_json(const std::vector<RankRow>& rows) {
  json out = json::array();
  for (const RankRow& r : rows) {
    out.push_back({{"model", r.model},
                   {"map_a", r.map_a},
                   {"rank_a", r.rank_a},
                   {"map_b", r.map_b},
                   {"rank_b", r.rank_b},
                   {"delta", r.delta}});
  }
  return out;
}

inline std::string to_csv(const std::vector<RankRow>& rows) {
  std::ostringstream out;
  out << "model,map_a,rank_a,map_b,rank_b,delta\n";
  for (const RankRow& r : rows) {
    out << r.model << ',' << json(r.map_a).dump() << ',' << r.rank_a << ','
        << json(r.map_b).dump() << ',' << r.rank_b << ',' << r.delta << "\n";
  }
  return out.str();
}

inline json to_json(const FlipResult& f) {
  return {{"class_id", f.class_id},
          {"flipped_prediction", f.flipped_prediction},
          {"flipped_rank", f.flipped_rank},
          {"original_ap", f.original_ap},
          {"perturbed_ap", f.perturbed_ap},
          {"relative_drop", f.relative_drop}};
}

}  // namespace brightkit::eval
