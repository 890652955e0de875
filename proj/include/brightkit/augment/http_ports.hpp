// Copyright 2026 The brightkit Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

// HTTP client for model services. Every port is a JSON POST:
//
//   POST /describe       {image, class, query}                    -> {text}
//   POST /generate       {prompt, seed}                           -> {image}
//   POST /detect         {image, labels}                          -> {persons, objects}
//   POST /verify_region  {image, human_box, object_box, class, query}
//                                                                 -> {answer, description}
//   POST /verify_text    {description, class, query}              -> {answer}
//   POST /paraphrase     {prompt, seed}                           -> {prompt}
//
// image is {handle, width, height}; boxes are [x1, y1, x2, y2]; class is
// {class_id, verb, object}; objects is [{label, box}]. An answer counts as
// yes when it starts with "yes".

#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include "httplib.h"

#include "brightkit/augment/ports.hpp"

namespace brightkit::augment {

inline json image_to_json(const ImageRef& r) {
  return {{"handle", r.handle}, {"width", r.width}, {"height", r.height}};
}

inline ImageRef image_from_json(const json& j) {
  return {j.at("handle").get<std::string>(), j.value("width", 0), j.value("height", 0)};
}

inline json class_to_json(const HoiClass& c) {
  return {{"class_id", c.class_id}, {"verb", c.verb_name}, {"object", c.object_name}};
}

/// Synchronous JSON-over-HTTP transport shared by all ports.
class HttpTransport {
 public:
  explicit HttpTransport(const std::string& base_url, time_t timeout_s = 120)
      : client_(base_url) {
    client_.set_connection_timeout(timeout_s, 0);
    client_.set_read_timeout(timeout_s, 0);
  }

  json post(const std::string& path, const json& body) {
    std::lock_guard<std::mutex> lock(mu_);
    auto res = client_.Post(path, body.dump(), "application/json");
    if (!res) {
      throw PortError("POST " + path + " failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw PortError("POST " + path + " returned HTTP " + std::to_string(res->status));
    }
    try {
      return json::parse(res->body);
    } catch (const json::parse_error& e) {
      throw PortError("POST " + path + " returned malformed JSON: " + e.what());
    }
  }

 private:
  httplib::Client client_;
  std::mutex mu_;
};

namespace detail {

template <typename F>
auto reply(const char* port, F&& read) -> decltype(read()) {
  try {
    return read();
  } catch (const json::exception& e) {
    throw PortError(std::string(port) + ": unexpected reply: " + e.what());
  } catch (const DataError& e) {
    throw PortError(std::string(port) + ": unexpected reply: " + e.what());
  }
}

}  // namespace detail

class HttpDescriber : public Describer {
 public:
  explicit HttpDescriber(std::shared_ptr<HttpTransport> t) : t_(std::move(t)) {}
  std::string describe(const ImageRef& image, const HoiClass& c, const std::string& query) override {
    const json r = t_->post("/describe", {{"image", image_to_json(image)},
                                          {"class", class_to_json(c)},
                                          {"query", query}});
    return detail::reply("describe", [&] { return r.at("text").get<std::string>(); });
  }

 private:
  std::shared_ptr<HttpTransport> t_;
};

class HttpGenerator : public Generator {
 public:
  explicit HttpGenerator(std::shared_ptr<HttpTransport> t) : t_(std::move(t)) {}
  ImageRef generate(const std::string& prompt, std::uint64_t seed) override {
    const json r = t_->post("/generate", {{"prompt", prompt}, {"seed", seed}});
    return detail::reply("generate", [&] { return image_from_json(r.at("image")); });
  }

 private:
  std::shared_ptr<HttpTransport> t_;
};

class HttpDetector : public Detector {
 public:
  explicit HttpDetector(std::shared_ptr<HttpTransport> t) : t_(std::move(t)) {}
  Detections detect(const ImageRef& image, const std::vector<std::string>& labels) override {
    const json r = t_->post("/detect", {{"image", image_to_json(image)}, {"labels", labels}});
    return detail::reply("detect", [&] {
      Detections d;
      for (const json& b : r.at("persons")) d.persons.push_back(brightkit::detail::parse_box(b, "detect"));
      for (const json& o : r.at("objects")) {
        d.objects.push_back({o.at("label").get<std::string>(),
                             brightkit::detail::parse_box(o.at("box"), "detect")});
      }
      return d;
    });
  }

 private:
  std::shared_ptr<HttpTransport> t_;
};

class HttpRegionVerifier : public RegionVerifier {
 public:
  explicit HttpRegionVerifier(std::shared_ptr<HttpTransport> t) : t_(std::move(t)) {}
  RegionVerdict verify(const ImageRef& image, const BBox& human, const BBox& object,
                       const HoiClass& c, const std::string& query) override {
    const json r = t_->post("/verify_region",
                            {{"image", image_to_json(image)},
                             {"human_box", brightkit::detail::box_to_json(human)},
                             {"object_box", brightkit::detail::box_to_json(object)},
                             {"class", class_to_json(c)},
                             {"query", query}});
    return detail::reply("verify_region", [&] {
      return RegionVerdict{is_yes(r.at("answer").get<std::string>()),
                           r.value("description", std::string{})};
    });
  }

 private:
  std::shared_ptr<HttpTransport> t_;
};

class HttpTextVerifier : public TextVerifier {
 public:
  explicit HttpTextVerifier(std::shared_ptr<HttpTransport> t) : t_(std::move(t)) {}
  bool verify(const std::string& description, const HoiClass& c,
              const std::string& query) override {
    const json r = t_->post("/verify_text", {{"description", description},
                                             {"class", class_to_json(c)},
                                             {"query", query}});
    return detail::reply("verify_text", [&] { return is_yes(r.at("answer").get<std::string>()); });
  }

 private:
  std::shared_ptr<HttpTransport> t_;
};

class HttpParaphraser : public Paraphraser {
 public:
  explicit HttpParaphraser(std::shared_ptr<HttpTransport> t) : t_(std::move(t)) {}
  std::string paraphrase(const std::string& prompt, std::uint64_t seed) override {
    const json r = t_->post("/paraphrase", {{"prompt", prompt}, {"seed", seed}});
    return detail::reply("paraphrase", [&] { return r.at("prompt").get<std::string>(); });
  }

 private:
  std::shared_ptr<HttpTransport> t_;
};

/// All six ports against one service base URL, e.g. "http://localhost:8000".
inline ServicePorts make_http_ports(const std::string& base_url) {
  auto t = std::make_shared<HttpTransport>(base_url);
  ServicePorts p;
  p.describer = std::make_shared<HttpDescriber>(t);
  p.generator = std::make_shared<HttpGenerator>(t);
  p.detector = std::make_shared<HttpDetector>(t);
  p.region_verifier = std::make_shared<HttpRegionVerifier>(t);
  p.text_verifier = std::make_shared<HttpTextVerifier>(t);
  p.paraphraser = std::make_shared<HttpParaphraser>(t);
  return p;
}

}  // namespace brightkit::augment
