// Copyright 2026 The brightkit Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Query and prompt text used by the augmentation pipeline.

#include <algorithm>
#include <map>
#include <sstream>
#include <string>

#include "brightkit/annotation.hpp"

namespace brightkit::augment {

/// Verb or object name as it should read in prose ("sit_on" -> "sit on").
inline std::string spoken(std::string name) {
  std::replace(name.begin(), name.end(), '_', ' ');
  return name;
}

/// Gerunds for the HICO-DET verb list; anything else gets "+ing" with the
/// usual silent-e and consonant-doubling adjustments.
inline const std::map<std::string, std::string>& gerund_table() {
  static const std::map<std::string, std::string> table = {
      {"adjust", "adjusting"},       {"assemble", "assembling"},
      {"block", "blocking"},         {"blow", "blowing"},
      {"board", "boarding"},         {"break", "breaking"},
      {"brush_with", "brushing with"}, {"buy", "buying"},
      {"carry", "carrying"},         {"catch", "catching"},
      {"chase", "chasing"},          {"check", "checking"},
      {"clean", "cleaning"},         {"control", "controlling"},
      {"cook", "cooking"},           {"cut", "cutting"},
      {"cut_with", "cutting with"},  {"direct", "directing"},
      {"drag", "dragging"},          {"dribble", "dribbling"},
      {"drink_with", "drinking with"}, {"drive", "driving"},
      {"dry", "drying"},             {"eat", "eating"},
      {"eat_at", "eating at"},       {"exit", "exiting"},
      {"feed", "feeding"},           {"fill", "filling"},
      {"flip", "flipping"},          {"flush", "flushing"},
      {"fly", "flying"},             {"greet", "greeting"},
      {"grind", "grinding"},         {"groom", "grooming"},
      {"herd", "herding"},           {"hit", "hitting"},
      {"hold", "holding"},           {"hop_on", "hopping on"},
      {"hose", "hosing"},            {"hug", "hugging"},
      {"hunt", "hunting"},           {"inspect", "inspecting"},
      {"install", "installing"},     {"jump", "jumping"},
      {"kick", "kicking"},           {"kiss", "kissing"},
      {"lasso", "lassoing"},         {"launch", "launching"},
      {"lick", "licking"},           {"lie_on", "lying on"},
      {"lift", "lifting"},           {"light", "lighting"},
      {"load", "loading"},           {"lose", "losing"},
      {"make", "making"},            {"milk", "milking"},
      {"move", "moving"},            {"no_interaction", "not interacting with"},
      {"open", "opening"},           {"operate", "operating"},
      {"pack", "packing"},           {"paint", "painting"},
      {"park", "parking"},           {"pay", "paying"},
      {"peel", "peeling"},           {"pet", "petting"},
      {"pick", "picking"},           {"pick_up", "picking up"},
      {"point", "pointing"},         {"pour", "pouring"},
      {"pull", "pulling"},           {"push", "pushing"},
      {"race", "racing"},            {"read", "reading"},
      {"release", "releasing"},      {"repair", "repairing"},
      {"ride", "riding"},            {"row", "rowing"},
      {"run", "running"},            {"sail", "sailing"},
      {"scratch", "scratching"},     {"serve", "serving"},
      {"set", "setting"},            {"shear", "shearing"},
      {"sign", "signing"},           {"sip", "sipping"},
      {"sit_at", "sitting at"},      {"sit_on", "sitting on"},
      {"slide", "sliding"},          {"smell", "smelling"},
      {"spin", "spinning"},          {"squeeze", "squeezing"},
      {"stab", "stabbing"},          {"stand_on", "standing on"},
      {"stand_under", "standing under"}, {"stick", "sticking"},
      {"stir", "stirring"},          {"stop_at", "stopping at"},
      {"straddle", "straddling"},    {"swing", "swinging"},
      {"tag", "tagging"},            {"talk_on", "talking on"},
      {"teach", "teaching"},         {"text_on", "texting on"},
      {"throw", "throwing"},         {"tie", "tying"},
      {"toast", "toasting"},         {"train", "training"},
      {"turn", "turning"},           {"type_on", "typing on"},
      {"walk", "walking"},           {"wash", "washing"},
      {"watch", "watching"},         {"wave", "waving"},
      {"wear", "wearing"},           {"wield", "wielding"},
      {"zip", "zipping"},
  };
  return table;
}

namespace detail {

inline bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

inline std::string default_gerund(const std::string& w) {
  const std::size_t n = w.size();
  if (n >= 2 && w.ends_with("ie")) return w.substr(0, n - 2) + "ying";
  if (n >= 2 && w.back() == 'e' && w[n - 2] != 'e') return w.substr(0, n - 1) + "ing";
  // One-vowel words ending consonant-vowel-consonant double the final consonant.
  const auto vowels = std::count_if(w.begin(), w.end(), is_vowel);
  if (n >= 3 && vowels == 1 && !is_vowel(w[n - 3]) && is_vowel(w[n - 2]) && !is_vowel(w[n - 1]) &&
      w[n - 1] != 'w' && w[n - 1] != 'x' && w[n - 1] != 'y') {
    return w + w.back() + "ing";
  }
  return w + "ing";
}

}  // namespace detail

inline std::string gerund(const std::string& verb) {
  if (verb.empty()) throw DataError("gerund: empty verb");
  const auto& table = gerund_table();
  if (auto it = table.find(verb); it != table.end()) return it->second;
  // Phrasal verbs: inflect the head word only.
  const std::size_t cut = verb.find('_');
  if (cut != std::string::npos) {
    return detail::default_gerund(verb.substr(0, cut)) + " " + spoken(verb.substr(cut + 1));
  }
  return detail::default_gerund(verb);
}

/// Web search query for crawling images of a class.
inline std::string crawl_query(const HoiClass& c) {
  if (c.verb_name.empty() || c.object_name.empty()) {
    throw DataError("crawl query: class " + std::to_string(c.class_id) +
                    " has an empty verb or object");
  }
  return "a photo of a/an person " + gerund(c.verb_name) + " a/an " + spoken(c.object_name);
}

/// Literal start every generation prompt must carry.
inline std::string prompt_prefix(const HoiClass& c) {
  return "A photo of a person " + spoken(c.verb_name) + " a/an " + spoken(c.object_name) + ", ";
}

/// Query sent to the describer together with the reference image.
inline std::string describe_query(const HoiClass& c) {
  return "<Image> Please provide a detailed description of the image, focusing on the main "
         "person who is " +
         spoken(c.verb_name) + " a " + spoken(c.object_name) +
         ". Follow this template for your answer: 'A photo of a person {verb} a/an {obj}, "
         "{description}.'";
}

/// Whole-image description request used during filtering.
inline std::string filter_description_query() {
  return "<Image> Please provide a detailed description of this image. Specifically, focus on "
         "the person, object, interaction with each other, and all background elements.";
}

inline std::string text_verification_query(const HoiClass& c, const std::string& description) {
  const std::string verb = spoken(c.verb_name), obj = spoken(c.object_name);
  return description +
         " This text provides a detailed description of the image. Your task is to determine "
         "if there is a Human-Object Interaction based on the questions I'm asking. Can you "
         "definitively determine from the text whether a person is performing the action " +
         verb + " on the object " + obj + "? If either the person or the " + obj +
         " is not present, or if you cannot clearly determine the " + verb +
         " action, respond with 'no'. Only respond with 'yes' if you can definitively "
         "determine the action, person, and " +
         obj + " based on the text. Please begin your response with 'yes' or 'no', followed "
               "by your explanation.";
}

inline std::string region_text(const BBox& b) {
  std::ostringstream s;
  s << '[' << json(b.x1).dump() << ", " << json(b.y1).dump() << ", " << json(b.x2).dump()
    << ", " << json(b.y2).dump() << ']';
  return s.str();
}

/// Region-grounded yes/no question for one person/object pair.
inline std::string pseudo_label_query(const HoiClass& c, const BBox& human, const BBox& object) {
  return "<Image> Considering the image, can you definitively determine that person " +
         region_text(human) + " is " + spoken(c.verb_name) + " " + spoken(c.object_name) +
         " " + region_text(object) +
         " in the image? Please respond with 'yes' or 'no', followed by your explanation.";
}

/// True when a model answer starts with "yes" (case-insensitive, leading
/// whitespace and quotes ignored).
inline bool is_yes(const std::string& answer) {
  std::size_t i = answer.find_first_not_of(" \t\r\n'\"`");
  if (i == std::string::npos || answer.size() - i < 3) return false;
  std::string head = answer.substr(i, 3);
  std::transform(head.begin(), head.end(), head.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return head == "yes";
}

}  // namespace brightkit::augment
