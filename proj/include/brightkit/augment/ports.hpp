// Copyright 2026 The brightkit Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Interfaces to the external models used by the augmentation pipeline, and
// deterministic in-process mocks of each.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "brightkit/annotation.hpp"
#include "brightkit/augment/text.hpp"

namespace brightkit::augment {

/// Opaque handle to an image held by a service or on disk. Pixels are never
/// read by the toolkit.
struct ImageRef {
  std::string handle;
  int width = 0;
  int height = 0;

  bool operator==(const ImageRef&) const = default;
};

struct LabeledBox {
  std::string label;
  BBox box;
};

struct Detections {
  std::vector<BBox> persons;
  std::vector<LabeledBox> objects;
};

struct RegionVerdict {
  bool yes = false;
  std::string description;
};

/// A port call that failed (transport error, bad reply, model error).
class PortError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vision-language model producing a generation prompt from a reference image.
class Describer {
 public:
  virtual ~Describer() = default;
  virtual std::string describe(const ImageRef& image, const HoiClass& c,
                               const std::string& query) = 0;
};

/// Text-to-image model.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual ImageRef generate(const std::string& prompt, std::uint64_t seed) = 0;
};

/// Open-vocabulary detector, prompted with the labels to look for.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual Detections detect(const ImageRef& image, const std::vector<std::string>& labels) = 0;
};

/// Region-grounded VLM answering about one person/object pair.
class RegionVerifier {
 public:
  virtual ~RegionVerifier() = default;
  virtual RegionVerdict verify(const ImageRef& image, const BBox& human, const BBox& object,
                               const HoiClass& c, const std::string& query) = 0;
};

/// Language model judging a region description.
class TextVerifier {
 public:
  virtual ~TextVerifier() = default;
  virtual bool verify(const std::string& description, const HoiClass& c,
                      const std::string& query) = 0;
};

class Paraphraser {
 public:
  virtual ~Paraphraser() = default;
  virtual std::string paraphrase(const std::string& prompt, std::uint64_t seed) = 0;
};

struct ServicePorts {
  std::shared_ptr<Describer> describer;
  std::shared_ptr<Generator> generator;
  std::shared_ptr<Detector> detector;
  std::shared_ptr<RegionVerifier> region_verifier;
  std::shared_ptr<TextVerifier> text_verifier;
  std::shared_ptr<Paraphraser> paraphraser;

  bool complete() const {
    return describer && generator && detector && region_verifier && text_verifier && paraphraser;
  }
};

// ---------------------------------------------------------------------------
// Mocks
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[i] = digits[v & 0xf];
  return out;
}

/// Yes/no answers following a fixed pattern over successive calls.
class VerdictSchedule {
 public:
  static VerdictSchedule accept_all() { return VerdictSchedule(1, 0); }
  static VerdictSchedule reject_all() { return VerdictSchedule(0, 0); }
  /// Answers yes on call numbers n (0-based) with n % period == phase.
  static VerdictSchedule periodic(std::uint64_t period, std::uint64_t phase) {
    return VerdictSchedule(period, phase);
  }

  VerdictSchedule(const VerdictSchedule& other)
      : period_(other.period_), phase_(other.phase_), calls_(other.calls_.load()) {}

  bool next() {
    const std::uint64_t n = calls_.fetch_add(1);
    if (period_ == 0) return false;
    return n % period_ == phase_;
  }

  std::uint64_t calls() const { return calls_.load(); }

 private:
  VerdictSchedule(std::uint64_t period, std::uint64_t phase) : period_(period), phase_(phase) {}

  std::uint64_t period_;
  std::uint64_t phase_;
  std::atomic<std::uint64_t> calls_{0};
};

/// Answers in template form with a fixed description. The first
/// `violations` calls return text that breaks the template.
class MockDescriber : public Describer {
 public:
  explicit MockDescriber(std::string description = "standing in an open field on a clear day",
                         int violations = 0)
      : description_(std::move(description)), violations_(violations) {}

  std::string describe(const ImageRef&, const HoiClass& c, const std::string&) override {
    const int n = calls_.fetch_add(1);
    if (n < violations_) return "I see a person in this picture.";
    return prompt_prefix(c) + description_ + ".";
  }

  int calls() const { return calls_.load(); }

 private:
  std::string description_;
  int violations_;
  std::atomic<int> calls_{0};
};

/// Handle derived from the prompt and seed; fixed image size.
class MockGenerator : public Generator {
 public:
  explicit MockGenerator(int size = 1024) : size_(size) {}

  ImageRef generate(const std::string& prompt, std::uint64_t seed) override {
    calls_.fetch_add(1);
    return {"mock://generated/" + hex64(fnv1a(prompt) ^ seed), size_, size_};
  }

  std::uint64_t calls() const { return calls_.load(); }

 private:
  int size_;
  std::atomic<std::uint64_t> calls_{0};
};

/// Reports `persons` people and `objects` instances of every requested
/// non-person label, laid out left to right on a fixed grid.
class MockDetector : public Detector {
 public:
  explicit MockDetector(int persons = 1, int objects = 1) : persons_(persons), objects_(objects) {}

  Detections detect(const ImageRef& image, const std::vector<std::string>& labels) override {
    Detections d;
    const double w = image.width > 0 ? image.width : 1024;
    const double h = image.height > 0 ? image.height : 1024;
    const auto persons_asked = std::count(labels.begin(), labels.end(), std::string("person"));
    const long targets = long(labels.size()) - persons_asked;
    // A second "person" label asks for people in the object role.
    const long people = persons_ + (persons_asked > 1 ? objects_ * (persons_asked - 1) : 0);
    const double step = w / double(std::max<long>(1, people + objects_ * targets));
    int k = 0;
    for (long i = 0; i < people; ++i, ++k) {
      d.persons.push_back({k * step, 0.1 * h, (k + 1) * step, 0.9 * h});
    }
    for (const std::string& label : labels) {
      if (label == "person") continue;
      for (int i = 0; i < objects_; ++i, ++k) {
        d.objects.push_back({label, {k * step, 0.5 * h, (k + 1) * step, 0.8 * h}});
      }
    }
    return d;
  }

 private:
  int persons_;
  int objects_;
};

/// Region verifier driven by a schedule, or by a predicate over the pair.
class MockRegionVerifier : public RegionVerifier {
 public:
  using Predicate = std::function<bool(const BBox& human, const BBox& object)>;

  explicit MockRegionVerifier(VerdictSchedule schedule = VerdictSchedule::accept_all())
      : schedule_(std::move(schedule)) {}
  explicit MockRegionVerifier(Predicate predicate)
      : schedule_(VerdictSchedule::accept_all()), predicate_(std::move(predicate)) {}

  RegionVerdict verify(const ImageRef&, const BBox& human, const BBox& object, const HoiClass& c,
                       const std::string&) override {
    const bool yes = predicate_ ? (schedule_.next(), predicate_(human, object)) : schedule_.next();
    return {yes, yes ? "a person " + spoken(c.verb_name) + " a " + spoken(c.object_name)
                     : "a person next to an unrelated object"};
  }

  std::uint64_t calls() const { return schedule_.calls(); }

 private:
  VerdictSchedule schedule_;
  Predicate predicate_;
};

class MockTextVerifier : public TextVerifier {
 public:
  explicit MockTextVerifier(VerdictSchedule schedule = VerdictSchedule::accept_all())
      : schedule_(std::move(schedule)) {}

  bool verify(const std::string&, const HoiClass&, const std::string&) override {
    return schedule_.next();
  }

  std::uint64_t calls() const { return schedule_.calls(); }

 private:
  VerdictSchedule schedule_;
};

/// Rewrites the description part after the template prefix with a
/// seed-tagged variant marker.
class MockParaphraser : public Paraphraser {
 public:
  std::string paraphrase(const std::string& prompt, std::uint64_t seed) override {
    calls_.fetch_add(1);
    return prompt + " (variant " + hex64(seed).substr(12) + ")";
  }

  std::uint64_t calls() const { return calls_.load(); }

 private:
  std::atomic<std::uint64_t> calls_{0};
};

/// A full mock bundle. The region verifier follows `region`; everything
/// else accepts.
inline ServicePorts make_mock_ports(VerdictSchedule region = VerdictSchedule::accept_all()) {
  ServicePorts p;
  p.describer = std::make_shared<MockDescriber>();
  p.generator = std::make_shared<MockGenerator>();
  p.detector = std::make_shared<MockDetector>();
  p.region_verifier = std::make_shared<MockRegionVerifier>(std::move(region));
  p.text_verifier = std::make_shared<MockTextVerifier>();
  p.paraphraser = std::make_shared<MockParaphraser>();
  return p;
}

}  // namespace brightkit::augment
