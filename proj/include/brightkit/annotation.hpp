// Copyright 2026 The brightkit Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"

#include "brightkit/error.hpp"
#include "brightkit/log.hpp"

namespace brightkit {

using json = nlohmann::json;
using ClassId = int;

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

/// One (verb, object) interaction class. The subject is always a person and
/// is not stored.
struct HoiClass {
  ClassId class_id = 0;
  int verb_id = 0;
  int object_id = 0;
  std::string verb_name;
  std::string object_name;

  bool operator==(const HoiClass&) const = default;
};

class Vocabulary {
 public:
  Vocabulary() = default;

  explicit Vocabulary(std::vector<HoiClass> classes)
      : classes_(std::move(classes)) {
    std::set<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < classes_.size(); ++i) {
      const HoiClass& c = classes_[i];
      if (c.class_id < 1) {
        throw DataError("class_id must be >= 1, got " +
                        std::to_string(c.class_id));
      }
      if (c.verb_name.empty() || c.object_name.empty()) {
        throw DataError("class " + std::to_string(c.class_id) +
                        " has an empty verb or object name");
      }
      if (!index_.emplace(c.class_id, i).second) {
        throw DataError("duplicate class_id " + std::to_string(c.class_id));
      }
      if (!pairs.emplace(c.verb_id, c.object_id).second) {
        throw DataError("duplicate (verb_id, object_id) pair for class " +
                        std::to_string(c.class_id));
      }
      verbs_.insert(c.verb_id);
      objects_.insert(c.object_id);
    }
  }

  const std::vector<HoiClass>& classes() const noexcept { return classes_; }
  std::size_t size() const noexcept { return classes_.size(); }
  bool empty() const noexcept { return classes_.empty(); }

  bool contains(ClassId id) const { return index_.contains(id); }

  const HoiClass* find(ClassId id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &classes_[it->second];
  }

  const HoiClass& at(ClassId id) const {
    const HoiClass* c = find(id);
    if (c == nullptr) {
      throw DataError("unknown class_id " + std::to_string(id));
    }
    return *c;
  }

  const std::set<int>& verb_ids() const noexcept { return verbs_; }
  const std::set<int>& object_ids() const noexcept { return objects_; }

  /// Sub-vocabulary holding the given ids, in this vocabulary's order.
  Vocabulary subset(const std::set<ClassId>& ids) const {
    std::vector<HoiClass> picked;
    for (const HoiClass& c : classes_) {
      if (ids.contains(c.class_id)) picked.push_back(c);
    }
    if (picked.size() != ids.size()) {
      throw DataError("subset requests class ids outside the vocabulary");
    }
    return Vocabulary(std::move(picked));
  }

  /// True when every class of `other` appears here with identical fields.
  bool includes(const Vocabulary& other) const {
    return std::all_of(other.classes_.begin(), other.classes_.end(),
                       [&](const HoiClass& c) {
                         const HoiClass* mine = find(c.class_id);
                         return mine != nullptr && *mine == c;
                       });
  }

  bool operator==(const Vocabulary& other) const {
    return classes_ == other.classes_;
  }

 private:
  std::vector<HoiClass> classes_;
  std::unordered_map<ClassId, std::size_t> index_;
  std::set<int> verbs_;
  std::set<int> objects_;
};

using VocabularyPtr = std::shared_ptr<const Vocabulary>;

// ---------------------------------------------------------------------------
// Boxes and instances
// ---------------------------------------------------------------------------

struct BBox {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return std::max(0.0, width()) * std::max(0.0, height()); }
  bool valid() const {
    return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
           std::isfinite(y2) && x2 > x1 && y2 > y1;
  }

  bool operator==(const BBox&) const = default;
};

/// Intersection over union; zero when either box is empty.
inline double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

enum class Provenance { real, generated, crawled };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::real: return "real";
    case Provenance::generated: return "generated";
    case Provenance::crawled: return "crawled";
  }
  return "real";
}

inline Provenance provenance_from_string(const std::string& s) {
  if (s == "real") return Provenance::real;
  if (s == "generated") return Provenance::generated;
  if (s == "crawled") return Provenance::crawled;
  throw DataError("unknown provenance '" + s + "'");
}

struct HoiInstance {
  BBox human_box;
  BBox object_box;
  ClassId class_id = 0;
  Provenance provenance = Provenance::real;

  bool operator==(const HoiInstance&) const = default;
};

struct ImageRecord {
  std::string image_id;
  std::string file_name;
  int width = 0;
  int height = 0;
  std::vector<HoiInstance> instances;

  bool operator==(const ImageRecord&) const = default;

  bool has_class(ClassId c) const {
    return std::any_of(instances.begin(), instances.end(),
                       [c](const HoiInstance& h) { return h.class_id == c; });
  }
};

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

/// Immutable collection of image records bound to a vocabulary. The
/// per-class instance count index is built on construction.
class Dataset {
 public:
  Dataset() : vocab_(std::make_shared<const Vocabulary>()) {}

  Dataset(VocabularyPtr vocab, std::vector<ImageRecord> images,
          std::string vocabulary_ref = {})
      : vocab_(std::move(vocab)),
        images_(std::move(images)),
        vocabulary_ref_(std::move(vocabulary_ref)) {
    if (!vocab_) throw DataError("dataset requires a vocabulary");
    std::unordered_set<std::string> seen;
    for (const ImageRecord& img : images_) {
      if (!seen.insert(img.image_id).second) {
        throw DataError("duplicate image_id '" + img.image_id + "'");
      }
      for (const HoiInstance& h : img.instances) {
        if (!vocab_->contains(h.class_id)) {
          throw DataError("image '" + img.image_id + "' references unknown class_id " +
                          std::to_string(h.class_id));
        }
        ++counts_[h.class_id];
        ++total_instances_;
      }
    }
  }

  const std::vector<ImageRecord>& images() const noexcept { return images_; }
  const Vocabulary& vocabulary() const noexcept { return *vocab_; }
  const VocabularyPtr& vocabulary_ptr() const noexcept { return vocab_; }
  const std::string& vocabulary_ref() const noexcept { return vocabulary_ref_; }

  std::size_t size() const noexcept { return images_.size(); }
  bool empty() const noexcept { return images_.empty(); }
  std::size_t total_instances() const noexcept { return total_instances_; }

  std::size_t count(ClassId c) const {
    auto it = counts_.find(c);
    return it == counts_.end() ? 0 : it->second;
  }

  /// class_id -> instance count, only for classes with at least one instance.
  const std::map<ClassId, std::size_t>& counts() const noexcept { return counts_; }

  std::set<std::string> image_ids() const {
    std::set<std::string> ids;
    for (const ImageRecord& img : images_) ids.insert(img.image_id);
    return ids;
  }

  /// Structural equality: same vocabulary content and same image records.
  bool operator==(const Dataset& other) const {
    return *vocab_ == *other.vocab_ && images_ == other.images_;
  }

 private:
  VocabularyPtr vocab_;
  std::vector<ImageRecord> images_;
  std::string vocabulary_ref_;
  std::map<ClassId, std::size_t> counts_;
  std::size_t total_instances_ = 0;
};

/// Image-multiset union. Requires identical vocabularies and disjoint ids.
inline Dataset merge(const Dataset& a, const Dataset& b) {
  if (a.vocabulary_ptr() != b.vocabulary_ptr() &&
      !(a.vocabulary() == b.vocabulary())) {
    throw DataError("cannot merge datasets with different vocabularies");
  }
  std::vector<ImageRecord> images = a.images();
  images.insert(images.end(), b.images().begin(), b.images().end());
  // The Dataset constructor reports any duplicate image_id.
  return Dataset(a.vocabulary_ptr(), std::move(images),
                 a.vocabulary_ref().empty() ? b.vocabulary_ref() : a.vocabulary_ref());
}

// ---------------------------------------------------------------------------
// File I/O
// ---------------------------------------------------------------------------

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'", path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'", path.string());
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'", path.string());
}

inline json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError("malformed JSON in '" + path.string() + "': " + e.what(),
                    path.string());
  }
}

namespace detail {

template <typename T>
T field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw DataError(where + ": missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw DataError(where + ": field '" + key + "' has the wrong type");
  }
}

inline BBox parse_box(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) {
    throw DataError(where + ": box must be [x1, y1, x2, y2]");
  }
  for (const json& v : j) {
    if (!v.is_number()) throw DataError(where + ": box coordinates must be numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

/// Rejects inverted boxes, then clamps into the image with a warning.
inline BBox checked_box(BBox b, int width, int height, const std::string& where) {
  if (!std::isfinite(b.x1) || !std::isfinite(b.y1) || !std::isfinite(b.x2) ||
      !std::isfinite(b.y2)) {
    throw DataError(where + ": non-finite box coordinate");
  }
  if (b.x2 <= b.x1 || b.y2 <= b.y1) {
    throw DataError(where + ": degenerate box (x2 <= x1 or y2 <= y1)");
  }
  const BBox clamped{std::clamp(b.x1, 0.0, double(width)),
                     std::clamp(b.y1, 0.0, double(height)),
                     std::clamp(b.x2, 0.0, double(width)),
                     std::clamp(b.y2, 0.0, double(height))};
  if (!(clamped == b)) {
    logger().warn("{}: box clamped to image bounds {}x{}", where, width, height);
    if (!clamped.valid()) {
      throw DataError(where + ": box lies outside the image");
    }
  }
  return clamped;
}

inline json box_to_json(const BBox& b) { return json::array({b.x1, b.y1, b.x2, b.y2}); }

}  // namespace detail

inline Vocabulary vocabulary_from_json(const json& j) {
  if (!j.is_array()) throw DataError("vocabulary must be a JSON array");
  std::vector<HoiClass> classes;
  classes.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "vocabulary[" + std::to_string(i) + "]";
    classes.push_back({detail::field<int>(j[i], "class_id", where),
                       detail::field<int>(j[i], "verb_id", where),
                       detail::field<int>(j[i], "object_id", where),
                       detail::field<std::string>(j[i], "verb", where),
                       detail::field<std::string>(j[i], "object", where)});
  }
  return Vocabulary(std::move(classes));
}

inline json vocabulary_to_json(const Vocabulary& v) {
  json out = json::array();
  for (const HoiClass& c : v.classes()) {
    out.push_back({{"class_id", c.class_id},
                   {"verb_id", c.verb_id},
                   {"object_id", c.object_id},
                   {"verb", c.verb_name},
                   {"object", c.object_name}});
  }
  return out;
}

inline VocabularyPtr load_vocabulary(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  try {
    return std::make_shared<const Vocabulary>(vocabulary_from_json(j));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what(), path.string());
  }
}

inline void save_vocabulary(const Vocabulary& v, const std::filesystem::path& path) {
  write_text_file(path, vocabulary_to_json(v).dump(1) + "\n");
}

inline Dataset dataset_from_json(const json& j, VocabularyPtr vocab) {
  if (!j.is_object()) throw DataError("annotation file must be a JSON object");
  if (!j.contains("images") || !j["images"].is_array()) {
    throw DataError("annotation file: missing 'images' array");
  }
  std::string ref;
  if (j.contains("vocabulary_ref") && j["vocabulary_ref"].is_string()) {
    ref = j["vocabulary_ref"].get<std::string>();
  }
  std::vector<ImageRecord> images;
  images.reserve(j["images"].size());
  for (std::size_t i = 0; i < j["images"].size(); ++i) {
    const json& ji = j["images"][i];
    const std::string where = "images[" + std::to_string(i) + "]";
    ImageRecord img;
    img.image_id = detail::field<std::string>(ji, "image_id", where);
    img.file_name = detail::field<std::string>(ji, "file_name", where);
    img.width = detail::field<int>(ji, "width", where);
    img.height = detail::field<int>(ji, "height", where);
    if (img.width <= 0 || img.height <= 0) {
      throw DataError(where + ": width and height must be positive");
    }
    const json& insts = ji.contains("instances") ? ji["instances"] : json::array();
    if (!insts.is_array()) throw DataError(where + ": 'instances' must be an array");
    for (std::size_t k = 0; k < insts.size(); ++k) {
      const std::string w = where + ".instances[" + std::to_string(k) + "]";
      HoiInstance h;
      if (!insts[k].is_object() || !insts[k].contains("human_box") ||
          !insts[k].contains("object_box")) {
        throw DataError(w + ": missing box field");
      }
      h.human_box = detail::checked_box(detail::parse_box(insts[k]["human_box"], w),
                                        img.width, img.height, w + ".human_box");
      h.object_box = detail::checked_box(detail::parse_box(insts[k]["object_box"], w),
                                         img.width, img.height, w + ".object_box");
      h.class_id = detail::field<int>(insts[k], "class_id", w);
      if (!vocab->contains(h.class_id)) {
        throw DataError(w + ": unknown class_id " + std::to_string(h.class_id));
      }
      h.provenance = insts[k].contains("provenance")
                         ? provenance_from_string(
                               detail::field<std::string>(insts[k], "provenance", w))
                         : Provenance::real;
      img.instances.push_back(h);
    }
    images.push_back(std::move(img));
  }
  return Dataset(std::move(vocab), std::move(images), std::move(ref));
}

/// Canonical JSON form. `meta`, when given, is written under a "meta" key
/// that loaders ignore.
inline json dataset_to_json(const Dataset& d, const json& meta = nullptr) {
  json images = json::array();
  for (const ImageRecord& img : d.images()) {
    json insts = json::array();
    for (const HoiInstance& h : img.instances) {
      insts.push_back({{"human_box", detail::box_to_json(h.human_box)},
                       {"object_box", detail::box_to_json(h.object_box)},
                       {"class_id", h.class_id},
                       {"provenance", to_string(h.provenance)}});
    }
    images.push_back({{"image_id", img.image_id},
                      {"file_name", img.file_name},
                      {"width", img.width},
                      {"height", img.height},
                      {"instances", std::move(insts)}});
  }
  json out = {{"vocabulary_ref", d.vocabulary_ref()}, {"images", std::move(images)}};
  if (!meta.is_null()) out["meta"] = meta;
  return out;
}

inline Dataset load_dataset(const std::filesystem::path& path, VocabularyPtr vocab) {
  const json j = read_json_file(path);
  try {
    return dataset_from_json(j, std::move(vocab));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what(), path.string());
  }
}

/// Loads an annotation file, resolving its vocabulary_ref relative to the
/// file when no vocabulary is supplied. An empty reference yields an empty
/// vocabulary, which only admits files without instances.
inline Dataset load_dataset(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  VocabularyPtr vocab = std::make_shared<const Vocabulary>();
  if (j.is_object() && j.contains("vocabulary_ref") && j["vocabulary_ref"].is_string() &&
      !j["vocabulary_ref"].get<std::string>().empty()) {
    std::filesystem::path ref = j["vocabulary_ref"].get<std::string>();
    if (ref.is_relative()) ref = path.parent_path() / ref;
    vocab = load_vocabulary(ref);
  }
  try {
    return dataset_from_json(j, std::move(vocab));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what(), path.string());
  }
}

inline void save_split(const Dataset& d, const std::filesystem::path& path,
                       const json& meta = nullptr) {
  write_text_file(path, dataset_to_json(d, meta).dump(1) + "\n");
}

}  // namespace brightkit
