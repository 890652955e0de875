// Copyright 2026 The brightkit Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "brightkit/annotation.hpp"
#include "brightkit/augment/ports.hpp"
#include "brightkit/augment/text.hpp"
#include "brightkit/log.hpp"
#include "brightkit/random.hpp"

namespace brightkit::augment {

/// Describer output that does not follow the prompt template.
class TemplateViolation : public DataError {
 public:
  using DataError::DataError;
};

struct PromptRecord {
  HoiClass hoi_class;
  std::string reference_image_id;
  std::string text;
  /// Paraphrases applied since the prompt was built.
  std::size_t paraphrase_generation = 0;
};

struct GenerationBudget {
  std::size_t max_attempts_per_class = 50;
  std::size_t target_valid = 1;

  void validate() const {
    if (max_attempts_per_class < 1 || target_valid < 1) {
      throw DataError("generation budget: attempts and target must be positive");
    }
  }
};

enum class Verdict { pending, accepted, rejected };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pending: return "pending";
    case Verdict::accepted: return "accepted";
    case Verdict::rejected: return "rejected";
  }
  return "pending";
}

class CandidatePair {
 public:
  CandidatePair(BBox human, BBox object) : human_box(human), object_box(object) {}

  BBox human_box;
  BBox object_box;

  Verdict verdict() const { return verdict_; }

  void decide(bool accept) {
    if (verdict_ != Verdict::pending) throw std::logic_error("candidate pair already decided");
    verdict_ = accept ? Verdict::accepted : Verdict::rejected;
  }

 private:
  Verdict verdict_ = Verdict::pending;
};

/// Samples a reference image annotated with the class and asks the describer
/// for a templated prompt. A template violation is retried once with the same
/// reference.
inline PromptRecord build_prompt(const HoiClass& c, const Dataset& references,
                                 const ServicePorts& ports, Rng& rng) {
  std::vector<const ImageRecord*> subset;
  for (const ImageRecord& img : references.images()) {
    if (img.has_class(c.class_id)) subset.push_back(&img);
  }
  if (subset.empty()) {
    throw DataError("build_prompt: no reference image annotated with class " +
                    std::to_string(c.class_id));
  }
  if (!ports.describer) throw DataError("build_prompt: no describer port configured");
  const ImageRecord& ref = *subset[rng.below(subset.size())];
  const ImageRef image{ref.file_name, ref.width, ref.height};
  const std::string prefix = prompt_prefix(c);
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string text = ports.describer->describe(image, c, describe_query(c));
    if (text.starts_with(prefix)) return {c, ref.image_id, std::move(text), 0};
    logger().debug("describer broke the template for class {}: {}", c.class_id, text);
  }
  throw TemplateViolation("build_prompt: describer output for class " +
                          std::to_string(c.class_id) + " does not start with '" + prefix + "'");
}

inline PromptRecord build_prompt(const HoiClass& c, const Dataset& references,
                                 const ServicePorts& ports, std::uint64_t seed) {
  Rng rng(seed);
  return build_prompt(c, references, ports, rng);
}

struct ValidImage {
  ImageRef image;
  std::string prompt;
  std::vector<CandidatePair> accepted;
};

struct GenerationOutcome {
  std::vector<ValidImage> images;
  std::size_t attempts = 0;          ///< generator calls plus failed prompt builds
  std::size_t paraphrases = 0;
  std::size_t port_failures = 0;
  bool budget_exhausted = false;
  /// One JSON object per event, in order.
  std::vector<json> log;
};

/// Boxes that can fill the object slot of `c`. Person-person classes pair two
/// distinct person detections.
inline std::vector<BBox> object_boxes(const Detections& d, const HoiClass& c) {
  if (c.object_name == "person") return d.persons;
  std::vector<BBox> out;
  for (const LabeledBox& o : d.objects) {
    if (o.label == c.object_name) out.push_back(o.box);
  }
  return out;
}

/// Generate-and-filter loop for one class.
///
/// Each attempt generates an image from the active prompt, detects people and
/// target objects, and checks every person/object pair with the region
/// verifier and then the text verifier. An image with an accepted pair is
/// kept and the next attempt starts from a fresh prompt; otherwise the
/// prompt is paraphrased. A failing port aborts only the current attempt.
inline GenerationOutcome generate_valid_images(const HoiClass& c, const GenerationBudget& budget,
                                               const Dataset& references,
                                               const ServicePorts& ports, std::uint64_t seed) {
  budget.validate();
  if (!ports.complete()) throw DataError("generate: all six service ports must be configured");

  GenerationOutcome out;
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(c.class_id)));
  auto event = [&](const char* kind, json extra) {
    extra["class_id"] = c.class_id;
    extra["attempt"] = out.attempts;
    extra["event"] = kind;
    out.log.push_back(std::move(extra));
  };

  std::optional<PromptRecord> prompt;
  while (out.images.size() < budget.target_valid && out.attempts < budget.max_attempts_per_class) {
    if (!prompt) {
      try {
        prompt = build_prompt(c, references, ports, rng);
      } catch (const TemplateViolation& e) {
        ++out.port_failures;
        event("prompt_failure", {{"error", e.what()}});
        // Counted against the budget so a broken describer cannot spin.
        ++out.attempts;
        continue;
      } catch (const PortError& e) {
        ++out.port_failures;
        event("prompt_failure", {{"error", e.what()}});
        ++out.attempts;
        continue;
      }
      event("prompt", {{"reference", prompt->reference_image_id}, {"text", prompt->text}});
    }

    ++out.attempts;
    try {
      const ImageRef image = ports.generator->generate(prompt->text, rng.next());
      event("generate", {{"image", image.handle},
                         {"paraphrase_generation", prompt->paraphrase_generation}});
      const Detections det = ports.detector->detect(image, {"person", c.object_name});

      std::vector<CandidatePair> pairs;
      for (const BBox& h : det.persons) {
        for (const BBox& o : object_boxes(det, c)) {
          if (o != h) pairs.emplace_back(h, o);
        }
      }
      std::vector<CandidatePair> accepted;
      for (CandidatePair& pair : pairs) {
        const RegionVerdict region = ports.region_verifier->verify(
            image, pair.human_box, pair.object_box, c, filter_description_query());
        bool ok = region.yes;
        if (ok) {
          ok = ports.text_verifier->verify(region.description, c,
                                           text_verification_query(c, region.description));
        }
        pair.decide(ok);
        event("pair", {{"human_box", brightkit::detail::box_to_json(pair.human_box)},
                       {"object_box", brightkit::detail::box_to_json(pair.object_box)},
                       {"region_yes", region.yes},
                       {"verdict", to_string(pair.verdict())}});
        if (ok) accepted.push_back(pair);
      }

      if (!accepted.empty()) {
        event("accept", {{"image", image.handle}, {"pairs", accepted.size()}});
        out.images.push_back({image, prompt->text, std::move(accepted)});
        prompt.reset();
      } else {
        event("reject", {{"image", image.handle}, {"pairs", pairs.size()}});
        prompt->text = ports.paraphraser->paraphrase(prompt->text, rng.next());
        ++prompt->paraphrase_generation;
        ++out.paraphrases;
        event("paraphrase", {{"text", prompt->text},
                             {"paraphrase_generation", prompt->paraphrase_generation}});
      }
    } catch (const PortError& e) {
      ++out.port_failures;
      event("port_failure", {{"error", e.what()}});
    }
  }
  out.budget_exhausted = out.images.size() < budget.target_valid;
  if (out.budget_exhausted) {
    event("budget_exhausted", {{"valid", out.images.size()}, {"target", budget.target_valid}});
  }
  return out;
}

/// Converts accepted images into annotation records with the given provenance.
/// Image ids are "<prefix><class_id>-<n>".
inline std::vector<ImageRecord> to_image_records(const HoiClass& c,
                                                 const std::vector<ValidImage>& images,
                                                 Provenance provenance,
                                                 const std::string& prefix = "gen-") {
  std::vector<ImageRecord> out;
  for (std::size_t i = 0; i < images.size(); ++i) {
    ImageRecord rec;
    rec.image_id = prefix + std::to_string(c.class_id) + "-" + std::to_string(i);
    rec.file_name = images[i].image.handle;
    rec.width = images[i].image.width;
    rec.height = images[i].image.height;
    for (const CandidatePair& p : images[i].accepted) {
      rec.instances.push_back({p.human_box, p.object_box, c.class_id, provenance});
    }
    out.push_back(std::move(rec));
  }
  return out;
}

struct PseudoLabels {
  std::vector<HoiInstance> instances;
  std::vector<std::string> warnings;
};

/// Asks the region verifier about every person x target-object pair; pairs
/// answered "yes" become annotations.
inline PseudoLabels pseudo_label(const ImageRef& image, const Detections& detections,
                                 const HoiClass& c, const ServicePorts& ports,
                                 Provenance provenance = Provenance::generated) {
  if (provenance == Provenance::real) {
    throw DataError("pseudo_label: provenance must be generated or crawled");
  }
  if (!ports.region_verifier) throw DataError("pseudo_label: no region verifier configured");
  PseudoLabels out;
  if (detections.persons.empty()) {
    out.warnings.push_back("no person detected in " + image.handle);
  }
  std::size_t targets = 0;
  for (const BBox& h : detections.persons) {
    for (const BBox& o : object_boxes(detections, c)) {
      if (o == h) continue;
      ++targets;
      const RegionVerdict v = ports.region_verifier->verify(image, h, o, c, pseudo_label_query(c, h, o));
      if (v.yes) out.instances.push_back({h, o, c.class_id, provenance});
    }
  }
  if (!detections.persons.empty() && targets == 0) {
    out.warnings.push_back("no '" + c.object_name + "' detected in " + image.handle);
  }
  for (const std::string& w : out.warnings) logger().warn("pseudo_label: {}", w);
  return out;
}

}  // namespace brightkit::augment
