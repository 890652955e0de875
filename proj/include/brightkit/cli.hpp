// Copyright 2026 The brightkit Authors
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Command-line front end. run() is the whole program; tools/brightkit.cpp
// only forwards argv. Exit codes: 0 ok, 2 usage, 3 data, 4 I/O.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "brightkit/annotation.hpp"
#include "brightkit/augment/http_ports.hpp"
#include "brightkit/augment/pipeline.hpp"
#include "brightkit/balancer.hpp"
#include "brightkit/error.hpp"
#include "brightkit/evaluator.hpp"
#include "brightkit/hicodet.hpp"
#include "brightkit/stats.hpp"
#include "brightkit/version.hpp"
#include "brightkit/zeroshot.hpp"

namespace brightkit::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kIo = 4 };

/// Reproducibility stamp written into every artifact.
inline json artifact_meta(std::uint64_t seed, const json& run_config) {
  return {{"toolkit_version", kVersion},
          {"seed", seed},
          {"config_hash", augment::hex64(augment::fnv1a(run_config.dump()))}};
}

inline std::string csv_header(const json& meta) {
  return "# brightkit " + meta["toolkit_version"].get<std::string>() +
         " seed=" + std::to_string(meta["seed"].get<std::uint64_t>()) +
         " config_hash=" + meta["config_hash"].get<std::string>() + "\n";
}

/// Files produced by a subcommand, written only after all work succeeded.
class ArtifactSet {
 public:
  explicit ArtifactSet(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }
  void add_json(const std::string& name, const json& j) { add(name, j.dump(1) + "\n"); }

  void commit() const {
    for (const auto& [name, content] : files_) write_text_file(dir_ / name, content);
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

namespace detail {

inline Dataset with_ref(const Dataset& d, const std::string& ref) {
  return Dataset(d.vocabulary_ptr(), d.images(), ref);
}

/// Loads and merges one or more annotation files.
inline Dataset load_pool(const std::vector<std::string>& paths, const std::string& vocab_path,
                         const std::string& format) {
  if (paths.empty()) throw UsageError("at least one --pool file is required");
  VocabularyPtr vocab;
  if (!vocab_path.empty()) vocab = load_vocabulary(vocab_path);
  std::optional<Dataset> pool;
  for (const std::string& p : paths) {
    Dataset d;
    if (format == "hicodet") {
      if (!vocab) throw UsageError("--format hicodet requires --vocab");
      d = hicodet::load_annotations(p, vocab);
    } else {
      d = vocab ? load_dataset(p, vocab) : load_dataset(p);
    }
    if (!vocab) vocab = d.vocabulary_ptr();
    pool = pool ? merge(*pool, d) : std::move(d);
  }
  return *pool;
}

inline Dataset load_one(const std::string& path, const VocabularyPtr& vocab) {
  return vocab ? load_dataset(path, vocab) : load_dataset(path);
}

inline json deficits_json(const std::map<ClassId, std::size_t>& deficits, const Vocabulary& vocab,
                          std::size_t target) {
  json rows = json::array();
  for (const auto& [id, missing] : deficits) {
    const HoiClass& c = vocab.at(id);
    rows.push_back({{"class_id", id}, {"verb", c.verb_name}, {"object", c.object_name},
                    {"missing", missing}});
  }
  return {{"target", target}, {"deficits", std::move(rows)}};
}

inline std::map<ClassId, std::size_t> deficits_from_json(const json& j) {
  std::map<ClassId, std::size_t> out;
  if (!j.contains("deficits") || !j["deficits"].is_array()) {
    throw DataError("deficits file: missing 'deficits' array");
  }
  for (const json& row : j["deficits"]) {
    out[brightkit::detail::field<int>(row, "class_id", "deficits")] =
        brightkit::detail::field<std::size_t>(row, "missing", "deficits");
  }
  return out;
}

/// Content digest of an input file, or of the *.json files of a directory,
/// so the config hash does not depend on where inputs live.
inline std::string digest(const std::string& path) {
  if (path.empty()) return {};
  if (!fs::is_directory(path)) return augment::hex64(augment::fnv1a(read_text_file(path)));
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(path)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::uint64_t h = augment::fnv1a("");
  for (const fs::path& f : files) {
    h = augment::fnv1a(f.filename().string(), h);
    h = augment::fnv1a(read_text_file(f), h);
  }
  return augment::hex64(h);
}

inline json digests(const std::vector<std::string>& paths) {
  json out = json::array();
  for (const std::string& p : paths) out.push_back(digest(p));
  return out;
}

/// Expands a JSON config into flag tokens for one subcommand. Top-level
/// scalars are shared; an object under the subcommand's name holds its own
/// keys. Keys already given on the command line are skipped.
inline std::vector<std::string> config_tokens(const json& cfg, const std::string& sub,
                                              const std::set<std::string>& given) {
  std::vector<std::string> out;
  auto emit = [&](const std::string& key, const json& v) {
    if (given.contains("--" + key)) return;
    auto scalar = [](const json& x) {
      return x.is_string() ? x.get<std::string>() : x.dump();
    };
    if (v.is_boolean()) {
      if (v.get<bool>()) out.push_back("--" + key);
    } else if (v.is_array()) {
      for (const json& x : v) {
        out.push_back("--" + key);
        out.push_back(scalar(x));
      }
    } else if (!v.is_object() && !v.is_null()) {
      out.push_back("--" + key);
      out.push_back(scalar(v));
    }
  };
  for (const auto& [k, v] : cfg.items()) {
    if (!v.is_object()) emit(k, v);
  }
  if (cfg.contains(sub) && cfg[sub].is_object()) {
    for (const auto& [k, v] : cfg[sub].items()) emit(k, v);
  }
  return out;
}

}  // namespace detail

/// Runs the CLI. `out` receives reports printed to stdout, `err` the
/// machine-readable error object on failure.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"brightkit: class-balanced HOI benchmark construction and evaluation", "brightkit"};
  app.require_subcommand(0, 1);
  app.set_version_flag("--version", std::string(kVersion));
  app.option_defaults()->always_capture_default();
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; command-line flags take precedence");

  std::uint64_t seed = 0;
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", seed, "RNG seed"); };

  // stats -------------------------------------------------------------------
  struct {
    std::vector<std::string> pools;
    std::string vocab, format = "canonical", test, out_dir;
    std::size_t top_k = 0;
    bool include_zero = false;
  } st;
  auto* stats_cmd = app.add_subcommand("stats", "Per-class distribution diagnostics");
  stats_cmd->add_option("--pool", st.pools, "Annotation file(s); several are merged")->required();
  stats_cmd->add_option("--vocab", st.vocab, "Vocabulary file");
  stats_cmd->add_option("--format", st.format)->check(CLI::IsMember({"canonical", "hicodet"}));
  stats_cmd->add_option("--test", st.test, "Test split, enables the train/test ratio report");
  stats_cmd->add_option("--top-k", st.top_k, "Also list the k most frequent classes");
  stats_cmd->add_flag("--include-zero", st.include_zero, "Count zero-instance classes in min");
  stats_cmd->add_option("--out-dir", st.out_dir, "Write stats.json and stats.csv here");
  add_seed(stats_cmd);

  // balance -----------------------------------------------------------------
  struct {
    std::vector<std::string> pools;
    std::string vocab, format = "canonical", out_dir, augmented;
    std::size_t top_k = 351, l_test = 10, l_train = 50, epochs = 20;
  } bl;
  auto* balance_cmd = app.add_subcommand("balance", "Build balanced test and train splits");
  balance_cmd->add_option("--pool", bl.pools, "Annotation file(s); several are merged")->required();
  balance_cmd->add_option("--vocab", bl.vocab, "Vocabulary file");
  balance_cmd->add_option("--format", bl.format)->check(CLI::IsMember({"canonical", "hicodet"}));
  balance_cmd->add_option("--top-k", bl.top_k, "Number of classes to balance");
  balance_cmd->add_option("--l-test", bl.l_test, "Instances per class in the test split");
  balance_cmd->add_option("--l-train", bl.l_train, "Instances per class in the train split");
  balance_cmd->add_option("--epochs", bl.epochs, "Add/remove rounds");
  balance_cmd->add_option("--augmented", bl.augmented, "Generated/crawled images to fill deficits");
  balance_cmd->add_option("--out-dir", bl.out_dir, "Output directory")->required();
  add_seed(balance_cmd);

  // zeroshot ----------------------------------------------------------------
  struct {
    std::string seen, universe, pool, out_dir;
    std::vector<std::string> exclude;
    std::size_t per_class = 10, classes = 107, epochs = 20;
  } zs;
  auto* zs_cmd = app.add_subcommand("zeroshot", "Build the balanced unseen-composition split");
  zs_cmd->add_option("--seen", zs.seen, "Vocabulary of the balanced (seen) classes")->required();
  zs_cmd->add_option("--universe", zs.universe, "Full vocabulary")->required();
  zs_cmd->add_option("--pool", zs.pool, "Real images unused by train/test")->required();
  zs_cmd->add_option("--exclude", zs.exclude, "Splits the pool must be disjoint from");
  zs_cmd->add_option("--per-class", zs.per_class, "Instances per class");
  zs_cmd->add_option("--classes", zs.classes, "Class budget");
  zs_cmd->add_option("--epochs", zs.epochs, "Add/remove rounds");
  zs_cmd->add_option("--out-dir", zs.out_dir, "Output directory")->required();
  add_seed(zs_cmd);

  // augment -----------------------------------------------------------------
  struct {
    std::string deficits, refs, vocab, target = "per-deficit", ports = "mock", endpoint, out_dir;
    std::size_t budget = 50, mock_accept_period = 1;
  } au;
  auto* aug_cmd = app.add_subcommand("augment", "Generate and filter images for deficit classes");
  aug_cmd->add_option("--deficits", au.deficits, "deficits.json from balance")->required();
  aug_cmd->add_option("--refs", au.refs, "Real reference annotations")->required();
  aug_cmd->add_option("--vocab", au.vocab, "Vocabulary file");
  aug_cmd->add_option("--budget", au.budget, "Generation attempts per class");
  aug_cmd->add_option("--target", au.target, "'per-deficit' or a fixed number of valid images");
  aug_cmd->add_option("--ports", au.ports, "Service backend")->check(CLI::IsMember({"mock", "http"}));
  aug_cmd->add_option("--endpoint", au.endpoint, "Service base URL for --ports http");
  aug_cmd->add_option("--mock-accept-period", au.mock_accept_period,
                      "Mock region verifier accepts every n-th pair (0 rejects all)");
  aug_cmd->add_option("--out-dir", au.out_dir, "Output directory")->required();
  add_seed(aug_cmd);

  // evaluate ----------------------------------------------------------------
  struct {
    std::string gt, preds, vocab, model, out, csv, ap_method = "all-point";
    double iou = 0.5;
  } ev;
  auto* eval_cmd = app.add_subcommand("evaluate", "Per-class AP and mAP of a prediction dump");
  eval_cmd->add_option("--gt", ev.gt, "Ground-truth annotation file")->required();
  eval_cmd->add_option("--preds", ev.preds, "Predictions, JSON lines")->required();
  eval_cmd->add_option("--vocab", ev.vocab, "Vocabulary file");
  eval_cmd->add_option("--iou", ev.iou, "Pair IoU threshold");
  eval_cmd->add_option("--ap-method", ev.ap_method)->check(CLI::IsMember({"all-point", "11-point"}));
  eval_cmd->add_option("--model", ev.model, "Model name stored in the report");
  eval_cmd->add_option("--out", ev.out, "Report JSON path (default: stdout)");
  eval_cmd->add_option("--csv", ev.csv, "Per-class CSV path");
  add_seed(eval_cmd);

  // perturb -----------------------------------------------------------------
  struct {
    std::string gt, preds, vocab, out, flip = "highest", ap_method = "all-point";
    int class_id = 0;
    double iou = 0.5;
  } pt;
  auto* pert_cmd = app.add_subcommand("perturb", "AP change when one true positive is flipped");
  pert_cmd->add_option("--class", pt.class_id, "Class id")->required();
  pert_cmd->add_option("--gt", pt.gt, "Ground-truth annotation file")->required();
  pert_cmd->add_option("--preds", pt.preds, "Predictions, JSON lines")->required();
  pert_cmd->add_option("--vocab", pt.vocab, "Vocabulary file");
  pert_cmd->add_option("--iou", pt.iou, "Pair IoU threshold");
  pert_cmd->add_option("--ap-method", pt.ap_method)->check(CLI::IsMember({"all-point", "11-point"}));
  pert_cmd->add_option("--flip", pt.flip)->check(CLI::IsMember({"highest", "lowest"}));
  pert_cmd->add_option("--out", pt.out, "Result JSON path (default: stdout)");
  add_seed(pert_cmd);

  // compare -----------------------------------------------------------------
  struct {
    std::string a, b, out, csv;
  } cp;
  auto* cmp_cmd = app.add_subcommand("compare", "Ranking shift between two sets of reports");
  cmp_cmd->add_option("--a", cp.a, "Directory of reports, one JSON per model")->required();
  cmp_cmd->add_option("--b", cp.b, "Directory of reports, one JSON per model")->required();
  cmp_cmd->add_option("--out", cp.out, "Table JSON path (default: stdout)");
  cmp_cmd->add_option("--csv", cp.csv, "Table CSV path");
  add_seed(cmp_cmd);

  auto fail = [&](const char* kind, const std::string& message, const std::string& path,
                  int code) {
    json e = {{"error", kind}, {"message", message}};
    if (!path.empty()) e["path"] = path;
    err << e.dump() << "\n";
    return code;
  };

  try {
    // Splice config-file values in front of the user's own flags.
    std::vector<std::string> argv = args;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
      if (args[i].starts_with("--config=")) config_path = args[i].substr(9);
    }
    if (!config_path.empty()) {
      const json cfg = read_json_file(config_path);
      if (!cfg.is_object()) throw DataError("config file must hold a JSON object", config_path);
      std::set<std::string> given;
      for (const std::string& a : args) given.insert(a.substr(0, a.find('=')));
      for (std::size_t i = 0; i < argv.size(); ++i) {
        const auto subs = app.get_subcommands([&](const CLI::App* a) { return a->check_name(argv[i]); });
        if (subs.empty()) continue;
        auto extra = detail::config_tokens(cfg, argv[i], given);
        argv.insert(argv.begin() + static_cast<std::ptrdiff_t>(i) + 1, extra.begin(), extra.end());
        break;
      }
    }
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::Success& e) {
      return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
      return fail("usage", e.what(), "", kUsage);
    }
    if (app.get_subcommands().empty()) {
      out << app.help();
      return kUsage;
    }

    if (stats_cmd->parsed()) {
      const Dataset pool = detail::load_pool(st.pools, st.vocab, st.format);
      std::optional<Dataset> test;
      if (!st.test.empty()) test = detail::load_one(st.test, pool.vocabulary_ptr());
      const json run_cfg = {{"command", "stats"}, {"pool", detail::digests(st.pools)}, {"vocab", detail::digest(st.vocab)},
                            {"format", st.format}, {"test", detail::digest(st.test)}, {"top_k", st.top_k},
                            {"include_zero", st.include_zero}};
      const json meta = artifact_meta(seed, run_cfg);
      const auto dist = stats::distribution(pool, st.include_zero);
      json report = {{"meta", meta}, {"images", pool.size()}, {"pool", stats::to_json(dist)}};
      report["median_count_nonzero"] = stats::median_count(dist, true);
      std::vector<stats::RatioRow> ratios;
      if (test) {
        const auto tdist = stats::distribution(*test, st.include_zero);
        ratios = stats::ratio_report(pool, *test);
        report["test"] = stats::to_json(tdist);
        report["ratios"] = stats::to_json(ratios);
        const auto unified = stats::distribution(merge(pool, *test), st.include_zero);
        report["unified"] = stats::to_json(unified);
      }
      if (st.top_k > 0) {
        const Vocabulary top = stats::top_k(stats::sorted_classes(pool), st.top_k, pool.vocabulary());
        report["top_k"] = vocabulary_to_json(top);
      }
      if (st.out_dir.empty()) {
        out << report.dump(1) << "\n";
      } else {
        ArtifactSet files(st.out_dir);
        files.add_json("stats.json", report);
        files.add("stats.csv", csv_header(meta) + stats::to_csv(pool.vocabulary(), dist,
                                                                 test ? &ratios : nullptr));
        files.commit();
      }
      return kOk;
    }

    if (balance_cmd->parsed()) {
      const Dataset total = detail::load_pool(bl.pools, bl.vocab, bl.format);
      std::optional<Dataset> augmented;
      if (!bl.augmented.empty()) augmented = detail::load_one(bl.augmented, total.vocabulary_ptr());
      BalanceConfig test_cfg{bl.l_test, bl.top_k, bl.epochs, seed};
      BalanceConfig train_cfg{bl.l_train, bl.top_k, bl.epochs, mix_seed(seed, 1)};
      test_cfg.validate();
      train_cfg.validate();
      const Vocabulary classes =
          stats::top_k(stats::sorted_classes(total), bl.top_k, total.vocabulary());
      SplitResult split = build_splits(total, classes, test_cfg, train_cfg);
      Dataset train = split.train;
      if (augmented) train = fill_deficits(split.train, split.train_deficits, *augmented);

      const json run_cfg = {{"command", "balance"}, {"pool", detail::digests(bl.pools)}, {"vocab", detail::digest(bl.vocab)},
                            {"format", bl.format}, {"top_k", bl.top_k}, {"l_test", bl.l_test},
                            {"l_train", bl.l_train}, {"epochs", bl.epochs},
                            {"augmented", detail::digest(bl.augmented)}};
      const json meta = artifact_meta(seed, run_cfg);
      json audit = {{"meta", meta},
                    {"test", {{"images", split.test.size()},
                              {"instances", split.test.total_instances()},
                              {"removed_annotations", split.audit.test_removed_annotations},
                              {"trimmed_images", split.audit.test_trimmed_images},
                              {"dropped_unselected", split.audit.test_dropped_unselected}}},
                    {"train", {{"images", train.size()},
                               {"instances", train.total_instances()},
                               {"removed_annotations", split.audit.train_removed_annotations},
                               {"trimmed_images", split.audit.train_trimmed_images},
                               {"dropped_unselected", split.audit.train_dropped_unselected},
                               {"deficit_filled", augmented.has_value()}}},
                    {"remainder_images", split.remainder.size()}};
      audit["test_deficits"] = detail::deficits_json(split.audit.test_deficits, total.vocabulary(),
                                                     bl.l_test)["deficits"];
      json deficits = detail::deficits_json(split.train_deficits, total.vocabulary(), bl.l_train);
      deficits["meta"] = meta;

      ArtifactSet files(bl.out_dir);
      files.add_json("vocab.json", vocabulary_to_json(total.vocabulary()));
      json cls = vocabulary_to_json(classes);
      files.add_json("classes.json", cls);
      files.add("test.json", dataset_to_json(detail::with_ref(split.test, "vocab.json"), meta).dump(1) + "\n");
      files.add("train.json", dataset_to_json(detail::with_ref(train, "vocab.json"), meta).dump(1) + "\n");
      files.add("remainder.json",
                dataset_to_json(detail::with_ref(split.remainder, "vocab.json"), meta).dump(1) + "\n");
      files.add_json("deficits.json", deficits);
      files.add_json("audit.json", audit);
      files.commit();
      return kOk;
    }

    if (zs_cmd->parsed()) {
      const VocabularyPtr universe = load_vocabulary(zs.universe);
      const VocabularyPtr seen = load_vocabulary(zs.seen);
      const Dataset pool = load_dataset(zs.pool, universe);
      std::vector<Dataset> excluded;
      for (const std::string& p : zs.exclude) excluded.push_back(load_dataset(p, universe));
      std::vector<const Dataset*> used;
      for (const Dataset& d : excluded) used.push_back(&d);
      zeroshot::check_disjoint(pool, used);

      zeroshot::ZeroShotPlan plan{zeroshot::enumerate_candidates(*seen, *universe), zs.per_class,
                                  zs.classes, pool};
      BalanceConfig cfg{zs.per_class, zs.classes, zs.epochs, seed};
      cfg.validate();
      const zeroshot::ZeroShotResult r = zeroshot::build_zeroshot_split(plan, cfg);

      const json run_cfg = {{"command", "zeroshot"}, {"seen", detail::digest(zs.seen)}, {"universe", detail::digest(zs.universe)},
                            {"pool", detail::digest(zs.pool)}, {"exclude", detail::digests(zs.exclude)},
                            {"per_class", zs.per_class}, {"classes", zs.classes},
                            {"epochs", zs.epochs}};
      const json meta = artifact_meta(seed, run_cfg);
      json report = {{"meta", meta},
                     {"candidates", plan.candidate_classes.size()},
                     {"classes", r.classes},
                     {"images", r.split.size()},
                     {"instances", r.split.total_instances()},
                     {"warnings", r.warnings}};
      json unsat = json::array(), over = json::array();
      for (const auto& c : r.unsatisfiable) unsat.push_back({{"class_id", c.class_id}, {"supply", c.supply}});
      for (const auto& c : r.over_budget) over.push_back({{"class_id", c.class_id}, {"supply", c.supply}});
      report["unsatisfiable"] = unsat;
      report["over_budget"] = over;

      ArtifactSet files(zs.out_dir);
      files.add_json("vocab.json", vocabulary_to_json(*universe));
      files.add_json("zeroshot_classes.json",
                     vocabulary_to_json(universe->subset({r.classes.begin(), r.classes.end()})));
      files.add("zeroshot.json",
                dataset_to_json(detail::with_ref(r.split, "vocab.json"), meta).dump(1) + "\n");
      files.add_json("zeroshot_report.json", report);
      files.commit();
      return kOk;
    }

    if (aug_cmd->parsed()) {
      VocabularyPtr vocab = au.vocab.empty() ? nullptr : load_vocabulary(au.vocab);
      const Dataset refs = detail::load_one(au.refs, vocab);
      const auto deficits = detail::deficits_from_json(read_json_file(au.deficits));
      std::optional<std::size_t> fixed_target;
      if (au.target != "per-deficit") {
        try {
          fixed_target = std::stoull(au.target);
        } catch (const std::exception&) {
          throw UsageError("--target must be 'per-deficit' or a positive integer");
        }
      }
      augment::ServicePorts ports;
      if (au.ports == "http") {
        if (au.endpoint.empty()) throw UsageError("--ports http requires --endpoint");
        ports = augment::make_http_ports(au.endpoint);
      } else {
        ports = augment::make_mock_ports(
            au.mock_accept_period == 0 ? augment::VerdictSchedule::reject_all()
                                       : augment::VerdictSchedule::periodic(au.mock_accept_period, au.mock_accept_period - 1));
      }
      const json run_cfg = {{"command", "augment"}, {"deficits", detail::digest(au.deficits)}, {"refs", detail::digest(au.refs)},
                            {"vocab", detail::digest(au.vocab)}, {"budget", au.budget}, {"target", au.target},
                            {"ports", au.ports}, {"endpoint", au.endpoint},
                            {"mock_accept_period", au.mock_accept_period}};
      const json meta = artifact_meta(seed, run_cfg);

      std::vector<ImageRecord> images;
      std::string log = json{{"meta", meta}}.dump() + "\n";
      json classes = json::array();
      for (const auto& [id, missing] : deficits) {
        const HoiClass& c = refs.vocabulary().at(id);
        augment::GenerationBudget budget{au.budget, fixed_target.value_or(missing)};
        const auto outcome = augment::generate_valid_images(c, budget, refs, ports, seed);
        for (const json& e : outcome.log) log += e.dump() + "\n";
        auto recs = augment::to_image_records(c, outcome.images, Provenance::generated);
        std::size_t instances = 0;
        for (const ImageRecord& r : recs) instances += r.instances.size();
        images.insert(images.end(), recs.begin(), recs.end());
        classes.push_back({{"class_id", id},
                           {"missing", missing},
                           {"valid_images", outcome.images.size()},
                           {"instances", instances},
                           {"attempts", outcome.attempts},
                           {"paraphrases", outcome.paraphrases},
                           {"port_failures", outcome.port_failures},
                           {"budget_exhausted", outcome.budget_exhausted},
                           {"crawl_query", augment::crawl_query(c)}});
      }
      const Dataset augmented(refs.vocabulary_ptr(), std::move(images), "vocab.json");
      ArtifactSet files(au.out_dir);
      files.add_json("vocab.json", vocabulary_to_json(refs.vocabulary()));
      files.add("augmented.json", dataset_to_json(augmented, meta).dump(1) + "\n");
      files.add("attempts.jsonl", log);
      files.add_json("augment_report.json", {{"meta", meta}, {"classes", classes}});
      files.commit();
      return kOk;
    }

    if (eval_cmd->parsed()) {
      VocabularyPtr vocab = ev.vocab.empty() ? nullptr : load_vocabulary(ev.vocab);
      const Dataset gt = detail::load_one(ev.gt, vocab);
      const auto preds = eval::load_predictions(ev.preds, gt.vocabulary());
      eval::MatchConfig mc{ev.iou, ev.ap_method == "11-point" ? eval::ApMethod::eleven_point
                                                              : eval::ApMethod::all_point};
      const std::string model = ev.model.empty() ? fs::path(ev.preds).stem().string() : ev.model;
      const eval::EvalReport report = eval::evaluate(preds, gt, gt.vocabulary(), mc, model);
      const json run_cfg = {{"command", "evaluate"}, {"gt", detail::digest(ev.gt)}, {"preds", detail::digest(ev.preds)},
                            {"vocab", detail::digest(ev.vocab)}, {"iou", ev.iou}, {"ap_method", ev.ap_method},
                            {"model", model}};
      const json meta = artifact_meta(seed, run_cfg);
      json j = eval::to_json(report);
      j["meta"] = meta;
      ArtifactSet files(".");
      if (!ev.csv.empty()) files.add(ev.csv, csv_header(meta) + eval::to_csv(report, gt.vocabulary()));
      if (!ev.out.empty()) files.add_json(ev.out, j);
      files.commit();
      if (ev.out.empty()) out << j.dump(1) << "\n";
      return kOk;
    }

    if (pert_cmd->parsed()) {
      VocabularyPtr vocab = pt.vocab.empty() ? nullptr : load_vocabulary(pt.vocab);
      const Dataset gt = detail::load_one(pt.gt, vocab);
      const auto preds = eval::load_predictions(pt.preds, gt.vocabulary());
      eval::MatchConfig mc{pt.iou, pt.ap_method == "11-point" ? eval::ApMethod::eleven_point
                                                              : eval::ApMethod::all_point};
      const auto r = eval::perturb_tp_flip(
          preds, gt, pt.class_id, mc,
          pt.flip == "lowest" ? eval::FlipTarget::lowest : eval::FlipTarget::highest);
      const json run_cfg = {{"command", "perturb"}, {"gt", detail::digest(pt.gt)}, {"preds", detail::digest(pt.preds)},
                            {"vocab", detail::digest(pt.vocab)}, {"class", pt.class_id}, {"iou", pt.iou},
                            {"ap_method", pt.ap_method}, {"flip", pt.flip}};
      json j = eval::to_json(r);
      j["meta"] = artifact_meta(seed, run_cfg);
      if (pt.out.empty()) {
        out << j.dump(1) << "\n";
      } else {
        write_text_file(pt.out, j.dump(1) + "\n");
      }
      return kOk;
    }

    if (cmp_cmd->parsed()) {
      auto load_dir = [](const std::string& dir) {
        if (!fs::is_directory(dir)) throw IoError("not a directory: '" + dir + "'", dir);
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir)) {
          if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        std::map<std::string, eval::EvalReport> reports;
        for (const fs::path& f : files) {
          eval::EvalReport r = eval::report_from_json(read_json_file(f), f.stem().string());
          if (!reports.emplace(r.model, r).second) {
            throw DataError("duplicate model '" + r.model + "' in " + dir, f.string());
          }
        }
        return reports;
      };
      const auto rows = eval::ranking_shift(load_dir(cp.a), load_dir(cp.b));
      const json run_cfg = {{"command", "compare"}, {"a", detail::digest(cp.a)}, {"b", detail::digest(cp.b)}};
      const json meta = artifact_meta(seed, run_cfg);
      const json j = {{"meta", meta}, {"rows", eval::to_json(rows)}};
      ArtifactSet files(".");
      if (!cp.csv.empty()) files.add(cp.csv, csv_header(meta) + eval::to_csv(rows));
      if (!cp.out.empty()) files.add_json(cp.out, j);
      files.commit();
      if (cp.out.empty()) out << j.dump(1) << "\n";
      return kOk;
    }
    return kUsage;
  } catch (const UsageError& e) {
    return fail("usage", e.what(), "", kUsage);
  } catch (const IoError& e) {
    return fail("io", e.what(), e.path(), kIo);
  } catch (const DataError& e) {
    return fail("data", e.what(), e.path(), kData);
  } catch (const json::exception& e) {
    return fail("data", e.what(), "", kData);
  }
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(std::move(args));
}

}  // namespace brightkit::cli
