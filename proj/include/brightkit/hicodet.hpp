// Copyright 2026 The brightkit Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Import of the public HICO-DET annotations into the canonical schema.
//
// Two inputs are understood:
//   * the widely mirrored JSON conversion (trainval_hico.json / test_hico.json)
//     holding a list of {file_name, annotations[{bbox, category_id}],
//     hoi_annotation[{subject_id, object_id, category_id, hoi_category_id}]}
//   * hico_list_hoi.txt, one "<id> <object> <verb>" row per class.

#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "brightkit/annotation.hpp"

namespace brightkit::hicodet {

/// Parses hico_list_hoi.txt. Header and separator rows are skipped. Verb ids
/// are assigned in alphabetical order of verb names, object ids in order of
/// first appearance.
inline Vocabulary parse_hoi_list(const std::string& text) {
  struct Row {
    int id;
    std::string object, verb;
  };
  std::vector<Row> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string id_tok, obj, verb;
    if (!(ls >> id_tok >> obj >> verb)) continue;
    if (id_tok.find_first_not_of("0123456789") != std::string::npos) continue;
    rows.push_back({std::stoi(id_tok), obj, verb});
  }
  std::map<std::string, int> verb_ids;
  for (const Row& r : rows) verb_ids.emplace(r.verb, 0);
  int next = 1;
  for (auto& [name, id] : verb_ids) id = next++;
  std::map<std::string, int> object_ids;
  std::vector<HoiClass> classes;
  for (const Row& r : rows) {
    auto [it, _] = object_ids.emplace(r.object, static_cast<int>(object_ids.size()) + 1);
    std::string object_name = r.object;
    std::replace(object_name.begin(), object_name.end(), '_', ' ');
    classes.push_back({r.id, verb_ids.at(r.verb), it->second, r.verb, object_name});
  }
  return Vocabulary(std::move(classes));
}

/// Converts the JSON list form. Image sizes are absent from that format, so
/// width/height are taken as the rounded-up extent of all boxes in the image.
/// Relations whose subject or object index is out of range are skipped.
inline Dataset import_annotations(const json& j, VocabularyPtr vocab,
                                  const std::string& id_prefix = {}) {
  if (!j.is_array()) throw DataError("HICO-DET annotations must be a JSON array");
  std::vector<ImageRecord> images;
  images.reserve(j.size());
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    const std::string where = "hico[" + std::to_string(i) + "]";
    ImageRecord img;
    img.file_name = detail::field<std::string>(e, "file_name", where);
    img.image_id = id_prefix + img.file_name;
    std::vector<BBox> boxes;
    if (e.contains("annotations")) {
      for (const json& a : e["annotations"]) {
        boxes.push_back(detail::parse_box(a.at("bbox"), where));
      }
    }
    double max_x = 1, max_y = 1;
    for (const BBox& b : boxes) {
      max_x = std::max(max_x, b.x2);
      max_y = std::max(max_y, b.y2);
    }
    img.width = static_cast<int>(std::ceil(max_x));
    img.height = static_cast<int>(std::ceil(max_y));
    if (e.contains("hoi_annotation")) {
      for (const json& h : e["hoi_annotation"]) {
        const int s = detail::field<int>(h, "subject_id", where);
        const int o = detail::field<int>(h, "object_id", where);
        if (s < 0 || o < 0 || s >= int(boxes.size()) || o >= int(boxes.size())) {
          ++skipped;
          continue;
        }
        HoiInstance inst;
        inst.class_id = detail::field<int>(h, "hoi_category_id", where);
        if (!vocab->contains(inst.class_id)) {
          throw DataError(where + ": unknown hoi_category_id " +
                          std::to_string(inst.class_id));
        }
        inst.human_box = detail::checked_box(boxes[s], img.width, img.height, where);
        inst.object_box = detail::checked_box(boxes[o], img.width, img.height, where);
        img.instances.push_back(inst);
      }
    }
    images.push_back(std::move(img));
  }
  if (skipped > 0) logger().warn("HICO-DET import skipped {} dangling relations", skipped);
  return Dataset(std::move(vocab), std::move(images));
}

inline Dataset load_annotations(const std::filesystem::path& path, VocabularyPtr vocab,
                                const std::string& id_prefix = {}) {
  const json j = read_json_file(path);
  try {
    return import_annotations(j, std::move(vocab), id_prefix);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what(), path.string());
  }
}

}  // namespace brightkit::hicodet
