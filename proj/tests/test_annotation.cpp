// Copyright 2026 The brightkit Authors
//
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "brightkit/annotation.hpp"
#include "brightkit/hicodet.hpp"
#include "support.hpp"

using namespace brightkit;
using bktest::image;
using bktest::TempDir;

namespace {

Dataset two_image_fixture() {
  auto vocab = bktest::grid_vocab(8);
  return Dataset(vocab, {image("a", {7, 7, 2}), image("b", {7, 3})});
}

}  // namespace

TEST(Vocabulary, RejectsDuplicateClassId) {
  EXPECT_THROW(Vocabulary({{1, 1, 1, "ride", "horse"}, {1, 2, 1, "feed", "horse"}}), DataError);
}

TEST(Vocabulary, RejectsDuplicateVerbObjectPair) {
  EXPECT_THROW(Vocabulary({{1, 1, 1, "ride", "horse"}, {2, 1, 1, "ride", "horse"}}), DataError);
}

TEST(Vocabulary, RejectsEmptyNames) {
  EXPECT_THROW(Vocabulary({{1, 1, 1, "", "horse"}}), DataError);
  EXPECT_THROW(Vocabulary({{1, 1, 1, "ride", ""}}), DataError);
}

TEST(Vocabulary, DerivedSets) {
  const Vocabulary v({{1, 1, 1, "ride", "horse"}, {2, 2, 1, "feed", "horse"},
                      {3, 1, 2, "ride", "bicycle"}});
  EXPECT_EQ(v.verb_ids().size(), 2u);
  EXPECT_EQ(v.object_ids().size(), 2u);
  EXPECT_TRUE(v.includes(v.subset({1, 3})));
  EXPECT_FALSE(v.subset({1}).includes(v));
}

TEST(Vocabulary, TopClassFileHasExpectedShape) {
  const auto vocab = load_vocabulary(BRIGHTKIT_DATA_DIR "/vocab351.json");
  EXPECT_EQ(vocab->size(), 351u);
  EXPECT_EQ(vocab->verb_ids().size(), 87u);
  EXPECT_EQ(vocab->object_ids().size(), 78u);
  EXPECT_EQ(vocab->at(1).verb_name, "board");
  EXPECT_EQ(vocab->at(1).object_name, "airplane");
}

TEST(Dataset, EmptyImagesArray) {
  const auto vocab = bktest::grid_vocab(3);
  const Dataset d = dataset_from_json(json{{"images", json::array()}}, vocab);
  EXPECT_EQ(d.size(), 0u);
  for (const HoiClass& c : vocab->classes()) EXPECT_EQ(d.count(c.class_id), 0u);
}

TEST(Dataset, CountMatchesLinearScan) {
  const Dataset d = two_image_fixture();
  EXPECT_EQ(d.count(7), 3u);
  EXPECT_EQ(d.count(7), bktest::recount(d, 7));
  EXPECT_EQ(d.total_instances(), 5u);
}

TEST(Dataset, RejectsUnknownClass) {
  EXPECT_THROW(Dataset(bktest::grid_vocab(3), {image("a", {4})}), DataError);
}

TEST(Dataset, RejectsDuplicateImageId) {
  EXPECT_THROW(Dataset(bktest::grid_vocab(3), {image("a", {1}), image("a", {2})}), DataError);
}

TEST(Dataset, ParseErrors) {
  const auto vocab = bktest::grid_vocab(3);
  EXPECT_THROW(dataset_from_json(json::object(), vocab), DataError);
  json j = dataset_to_json(Dataset(vocab, {image("a", {1})}));
  j["images"][0].erase("width");
  EXPECT_THROW(dataset_from_json(j, vocab), DataError);
}

TEST(Dataset, DegenerateBoxIsAnError) {
  const auto vocab = bktest::grid_vocab(3);
  json j = dataset_to_json(Dataset(vocab, {image("a", {1})}));
  j["images"][0]["instances"][0]["human_box"] = {50, 10, 50, 90};
  EXPECT_THROW(dataset_from_json(j, vocab), DataError);
}

TEST(Dataset, BoxesAreClampedToTheImage) {
  const auto vocab = bktest::grid_vocab(3);
  json j = dataset_to_json(Dataset(vocab, {image("a", {1})}));
  j["images"][0]["instances"][0]["object_box"] = {600, 400, 700, 500};
  const Dataset d = dataset_from_json(j, vocab);
  const BBox& b = d.images()[0].instances[0].object_box;
  EXPECT_EQ(b.x2, 640);
  EXPECT_EQ(b.y2, 480);
}

TEST(Dataset, ProvenanceDefaultsToReal) {
  const auto vocab = bktest::grid_vocab(3);
  json j = dataset_to_json(Dataset(vocab, {image("a", {1})}));
  j["images"][0]["instances"][0].erase("provenance");
  EXPECT_EQ(dataset_from_json(j, vocab).images()[0].instances[0].provenance, Provenance::real);
}

TEST(Merge, EmptyIsIdentity) {
  const Dataset d = two_image_fixture();
  EXPECT_EQ(merge(d, Dataset(d.vocabulary_ptr(), {})), d);
}

TEST(Merge, DuplicateIdsAndVocabularyMismatch) {
  const auto vocab = bktest::grid_vocab(3);
  const Dataset a(vocab, {image("x", {1})});
  const Dataset b(vocab, {image("x", {2})});
  EXPECT_THROW(merge(a, b), DataError);
  const Dataset c(bktest::grid_vocab(4), {image("y", {1})});
  EXPECT_THROW(merge(a, c), DataError);
}

TEST(Merge, SumsCounts) {
  const auto vocab = bktest::grid_vocab(3);
  const Dataset m = merge(Dataset(vocab, {image("x", {1, 2})}), Dataset(vocab, {image("y", {1})}));
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(m.count(1), 2u);
  EXPECT_EQ(m.total_instances(), 3u);
}

TEST(RoundTrip, EmptyDataset) {
  TempDir dir("rt-empty");
  const Dataset d(bktest::grid_vocab(3), {});
  save_split(d, dir / "d.json");
  EXPECT_EQ(load_dataset(dir / "d.json", d.vocabulary_ptr()), d);
}

TEST(RoundTrip, FixtureKeepsCounts) {
  TempDir dir("rt-fixture");
  const Dataset d = two_image_fixture();
  save_vocabulary(d.vocabulary(), dir / "vocab.json");
  save_split(Dataset(d.vocabulary_ptr(), d.images(), "vocab.json"), dir / "d.json");
  const Dataset back = load_dataset(dir / "d.json");
  EXPECT_EQ(back, d);
  EXPECT_EQ(back.counts(), d.counts());
}

TEST(RoundTrip, ProvenancePreserved) {
  TempDir dir("rt-prov");
  const auto vocab = bktest::grid_vocab(3);
  const Dataset d(vocab, {image("g", {1, 2}, Provenance::generated),
                          image("c", {3}, Provenance::crawled)});
  save_split(d, dir / "d.json");
  const Dataset back = load_dataset(dir / "d.json", vocab);
  EXPECT_EQ(back.images()[0].instances[1].provenance, Provenance::generated);
  EXPECT_EQ(back.images()[1].instances[0].provenance, Provenance::crawled);
  EXPECT_EQ(back, d);
}

TEST(FileIo, MissingFileIsIoError) {
  EXPECT_THROW(load_vocabulary("/nonexistent/vocab.json"), IoError);
}

TEST(FileIo, MalformedJsonIsDataError) {
  TempDir dir("bad-json");
  write_text_file(dir / "x.json", "{not json");
  EXPECT_THROW(read_json_file(dir / "x.json"), DataError);
}

TEST(HicoDet, ParsesHoiList) {
  const Vocabulary v = hicodet::parse_hoi_list(
      "id  object  verb\n"
      "--------------\n"
      "001 airplane board\n"
      "002 airplane direct\n"
      "003 bicycle ride\n"
      "004 cell_phone talk_on\n");
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v.at(4).object_name, "cell phone");
  EXPECT_EQ(v.at(4).verb_name, "talk_on");
  EXPECT_EQ(v.at(1).object_id, v.at(2).object_id);
  EXPECT_EQ(v.object_ids().size(), 3u);
  EXPECT_EQ(v.verb_ids().size(), 4u);
}

TEST(HicoDet, ImportsRelationList) {
  const auto vocab = bktest::grid_vocab(4);
  const json j = json::parse(R"([
    {"file_name": "HICO_train2015_00000001.jpg",
     "annotations": [{"bbox": [10, 10, 100, 200], "category_id": 1},
                     {"bbox": [120, 50, 300, 180], "category_id": 5}],
     "hoi_annotation": [{"subject_id": 0, "object_id": 1, "hoi_category_id": 2},
                        {"subject_id": 0, "object_id": 1, "hoi_category_id": 3},
                        {"subject_id": 0, "object_id": 7, "hoi_category_id": 1}]}
  ])");
  const Dataset d = hicodet::import_annotations(j, vocab);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.total_instances(), 2u);
  EXPECT_EQ(d.count(2), 1u);
  EXPECT_EQ(d.images()[0].width, 300);
  EXPECT_EQ(d.images()[0].height, 200);
}
