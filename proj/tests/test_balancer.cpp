// Copyright 2026 The brightkit Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <map>
#include <set>

#include "brightkit/balancer.hpp"
#include "support.hpp"

using namespace brightkit;
using bktest::image;

namespace {

std::map<std::string, const ImageRecord*> by_id(const Dataset& d) {
  std::map<std::string, const ImageRecord*> m;
  for (const ImageRecord& img : d.images()) m[img.image_id] = &img;
  return m;
}

std::size_t selected_instances(const ImageRecord& img, const Vocabulary& classes) {
  std::size_t n = 0;
  for (const HoiInstance& h : img.instances) n += classes.contains(h.class_id);
  return n;
}

}  // namespace

TEST(Balance, ExactSupplyWithoutCooccurrence) {
  const auto vocab = bktest::grid_vocab(4);
  const std::size_t L = 5;
  std::vector<ImageRecord> images;
  for (int c = 1; c <= 4; ++c) {
    for (std::size_t i = 0; i < L; ++i) {
      images.push_back(image("c" + std::to_string(c) + "-" + std::to_string(i), {c}));
    }
  }
  const Dataset pool(vocab, images);
  const BalanceResult r = balance(pool, *vocab, {L, 4, 20, 7});
  EXPECT_EQ(r.balanced.size(), 4 * L);
  EXPECT_TRUE(r.deficits.empty());
  EXPECT_EQ(r.removed_annotations, 0u);
  EXPECT_TRUE(r.remainder.empty());
}

TEST(Balance, ShortClassReportsDeficit) {
  const auto vocab = bktest::grid_vocab(2);
  std::vector<ImageRecord> images;
  for (int i = 0; i < 3; ++i) images.push_back(image("a" + std::to_string(i), {1}));
  for (int i = 0; i < 12; ++i) images.push_back(image("b" + std::to_string(i), {2}));
  const BalanceResult r = balance(Dataset(vocab, images), *vocab, {10, 2, 20, 0});
  ASSERT_EQ(r.deficits.size(), 1u);
  EXPECT_EQ(r.deficits.at(1), 7u);
  EXPECT_EQ(r.balanced.count(1), 3u);
  EXPECT_EQ(r.balanced.count(2), 10u);
}

TEST(Balance, HeavyCooccurrenceIsExactAndDisjoint) {
  const auto vocab = bktest::grid_vocab(5);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    // 40 images with 2..4 instances each.
    std::mt19937_64 gen(seed);
    std::vector<ImageRecord> images;
    for (int i = 0; i < 40; ++i) {
      std::vector<ClassId> cls;
      for (int k = 2 + int(gen() % 3); k > 0; --k) cls.push_back(1 + int(gen() % 5));
      images.push_back(image("img" + std::to_string(i), cls));
    }
    const Dataset pool(vocab, images);
    const std::size_t L = 6;
    const BalanceResult r = balance(pool, *vocab, {L, 5, 20, seed});
    for (const HoiClass& c : vocab->classes()) {
      const std::size_t n = bktest::recount(r.balanced, c.class_id);
      if (r.deficits.contains(c.class_id)) {
        EXPECT_EQ(n + r.deficits.at(c.class_id), L);
      } else {
        EXPECT_EQ(n, L) << "class " << c.class_id << " seed " << seed;
      }
    }
    std::set<std::string> all;
    for (const auto& id : r.balanced.image_ids()) EXPECT_TRUE(all.insert(id).second);
    for (const auto& id : r.remainder.image_ids()) EXPECT_TRUE(all.insert(id).second);
    EXPECT_EQ(all, pool.image_ids());
  }
}

TEST(Balance, DeficitOnlyWhenSupplyIsShort) {
  const auto vocab = bktest::grid_vocab(8);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Dataset pool = bktest::random_pool(seed, vocab, 50);
    const BalanceResult r = balance(pool, *vocab, {8, 8, 20, seed});
    for (const auto& [c, missing] : r.deficits) {
      EXPECT_GT(missing, 0u);
      // Every pool image of a deficit class ended up in the balanced set.
      for (const ImageRecord& img : pool.images()) {
        if (img.has_class(c)) EXPECT_TRUE(r.balanced.image_ids().contains(img.image_id));
      }
    }
  }
}

TEST(Balance, TrimmingRemovesAnnotationsNotImages) {
  // Class 2 lives only next to class 1, so filling class 2 overshoots class 1.
  const auto vocab = bktest::grid_vocab(2);
  std::vector<ImageRecord> images;
  for (int i = 0; i < 6; ++i) images.push_back(image("mix" + std::to_string(i), {1, 1, 2}));
  for (int i = 0; i < 4; ++i) images.push_back(image("solo" + std::to_string(i), {1}));
  const Dataset pool(vocab, images);
  const BalanceResult r = balance(pool, *vocab, {5, 2, 20, 3});
  EXPECT_EQ(r.balanced.count(1), 5u);
  EXPECT_EQ(r.balanced.count(2), 5u);
  EXPECT_GT(r.removed_annotations, 0u);

  const auto original = by_id(pool);
  std::size_t before = 0;
  for (const ImageRecord& img : r.balanced.images()) {
    before += selected_instances(*original.at(img.image_id), *vocab);
  }
  EXPECT_EQ(before - r.removed_annotations, r.balanced.total_instances());
  EXPECT_EQ(r.trimmed_images > 0, r.removed_annotations > 0);
}

TEST(Balance, DeficitClassesAreNeverTrimmed) {
  const auto vocab = bktest::grid_vocab(6);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Dataset pool = bktest::random_pool(seed, vocab, 30);
    const BalanceResult r = balance(pool, *vocab, {7, 6, 20, seed});
    const auto original = by_id(pool);
    for (const auto& [c, missing] : r.deficits) {
      std::size_t before = 0;
      for (const ImageRecord& img : r.balanced.images()) {
        for (const HoiInstance& h : original.at(img.image_id)->instances) before += h.class_id == c;
      }
      EXPECT_EQ(before, r.balanced.count(c));
    }
  }
}

TEST(Balance, UnselectedClassesAreDropped) {
  const auto vocab = bktest::grid_vocab(3);
  const Dataset pool(vocab, {image("a", {1, 3}), image("b", {1}), image("c", {2})});
  const BalanceResult r = balance(pool, vocab->subset({1, 2}), {1, 2, 5, 0});
  EXPECT_EQ(r.balanced.count(3), 0u);
  EXPECT_EQ(r.balanced.count(1), 1u);
  EXPECT_EQ(r.balanced.count(2), 1u);
}

TEST(Balance, DeterministicForSeed) {
  const auto vocab = bktest::grid_vocab(10);
  const Dataset pool = bktest::random_pool(5, vocab, 120);
  const BalanceConfig cfg{6, 10, 20, 42};
  const BalanceResult a = balance(pool, *vocab, cfg);
  const BalanceResult b = balance(pool, *vocab, cfg);
  EXPECT_EQ(dataset_to_json(a.balanced).dump(), dataset_to_json(b.balanced).dump());
  EXPECT_EQ(a.deficits, b.deficits);
  EXPECT_EQ(a.removed_annotations, b.removed_annotations);
  const BalanceResult c = balance(pool, *vocab, {6, 10, 20, 43});
  EXPECT_NE(dataset_to_json(a.balanced).dump(), dataset_to_json(c.balanced).dump());
}

TEST(Balance, ConfigAndClassErrors) {
  const auto vocab = bktest::grid_vocab(3);
  const Dataset pool(vocab, {image("a", {1})});
  EXPECT_THROW(balance(pool, *vocab, {0, 3, 20, 0}), DataError);
  EXPECT_THROW(balance(pool, *vocab, {1, 3, 0, 0}), DataError);
  EXPECT_THROW(balance(pool, *bktest::grid_vocab(4), {1, 4, 1, 0}), DataError);
  EXPECT_NO_THROW(balance(pool, *vocab, {100, 3, 1, 0}));
}

TEST(BuildSplits, TestFirstAndDisjoint) {
  const auto vocab = bktest::grid_vocab(6);
  const Dataset total = bktest::random_pool(9, vocab, 120);
  const SplitResult s = build_splits(total, *vocab, {3, 6, 20, 1}, {8, 6, 20, 2});
  for (const auto& id : s.test.image_ids()) EXPECT_FALSE(s.train.image_ids().contains(id));
  for (const HoiClass& c : vocab->classes()) {
    if (!s.audit.test_deficits.contains(c.class_id)) EXPECT_EQ(s.test.count(c.class_id), 3u);
    const std::size_t missing =
        s.train_deficits.contains(c.class_id) ? s.train_deficits.at(c.class_id) : 0;
    EXPECT_EQ(s.train.count(c.class_id) + missing, 8u);
  }
  EXPECT_EQ(s.test.size() + s.train.size() + s.remainder.size(), total.size());
}

TEST(BuildSplits, ExactMultipleHasNoDeficits) {
  const auto vocab = bktest::grid_vocab(3);
  std::vector<ImageRecord> images;
  for (int c = 1; c <= 3; ++c) {
    for (int i = 0; i < 6; ++i) images.push_back(image(std::to_string(c) + "-" + std::to_string(i), {c}));
  }
  const SplitResult s = build_splits(Dataset(vocab, images), *vocab, {2, 3, 20, 0}, {4, 3, 20, 1});
  EXPECT_TRUE(s.train_deficits.empty());
  EXPECT_TRUE(s.audit.test_deficits.empty());
  EXPECT_EQ(s.audit.test_removed_annotations + s.audit.train_removed_annotations, 0u);
}

TEST(BuildSplits, RejectsNonRealPool) {
  const auto vocab = bktest::grid_vocab(2);
  const Dataset total(vocab, {image("a", {1}), image("g", {2}, Provenance::generated)});
  EXPECT_THROW(build_splits(total, *vocab, {1, 2, 5, 0}, {1, 2, 5, 0}), DataError);
}

TEST(FillDeficits, NoDeficitIsIdentity) {
  const auto vocab = bktest::grid_vocab(2);
  const Dataset train(vocab, {image("a", {1})});
  EXPECT_EQ(fill_deficits(train, {}, Dataset(vocab, {})), train);
}

TEST(FillDeficits, FillsExactly) {
  const auto vocab = bktest::grid_vocab(2);
  const Dataset train(vocab, {image("a", {1, 1, 1}), image("b", {2})});
  const Dataset aug(vocab, {image("g0", {2, 2}, Provenance::generated),
                            image("g1", {2}, Provenance::crawled)});
  const Dataset out = fill_deficits(train, {{2, 2}}, aug);
  EXPECT_EQ(out.count(2), 3u);
  EXPECT_EQ(out.count(1), 3u);
  // g1 is not needed once g0 covers the deficit.
  EXPECT_FALSE(out.image_ids().contains("g1"));
}

TEST(FillDeficits, SurplusInstancesAreDropped) {
  const auto vocab = bktest::grid_vocab(2);
  const Dataset train(vocab, {image("a", {1})});
  const Dataset aug(vocab, {image("g0", {2, 2, 2}, Provenance::generated)});
  EXPECT_EQ(fill_deficits(train, {{2, 2}}, aug).count(2), 2u);
}

TEST(FillDeficits, Errors) {
  const auto vocab = bktest::grid_vocab(3);
  const Dataset train(vocab, {image("a", {1})});
  EXPECT_THROW(fill_deficits(train, {{2, 3}}, Dataset(vocab, {image("g", {2}, Provenance::generated)})),
               DataError);
  EXPECT_THROW(fill_deficits(train, {{2, 1}}, Dataset(vocab, {image("r", {2})})), DataError);
  EXPECT_THROW(fill_deficits(train, {{2, 1}}, Dataset(vocab, {image("g", {3}, Provenance::generated)})),
               DataError);
}
