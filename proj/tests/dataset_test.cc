// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#include "evpupil/dataset.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include <json.hpp>

#include "evpupil/error.h"
#include "evpupil/png_io.h"
#include "testing/temp_dir.h"

namespace evpupil {
namespace {

const SensorGeometry kDavis{346, 260};

TEST(YoloLabel, FormatsNormalizedBox) {
  const Box box{153, 118, 193, 142};  // 40 x 24 centred on (173, 130)
  const Annotation a = AnnotationFromPixelBox(box, kDavis);
  EXPECT_EQ(WriteYoloLabel(std::vector<Annotation>{a}),
            "0 0.500000 0.500000 0.115607 0.092308\n");
}

TEST(YoloLabel, EmptyListIsEmptyFile) {
  EXPECT_EQ(WriteYoloLabel({}), "");
  EXPECT_TRUE(ReadYoloLabel("").empty());
  EXPECT_TRUE(ReadYoloLabel("\n\n").empty());
}

TEST(YoloLabel, RejectsMalformedAndOutOfRange) {
  EXPECT_THROW(ReadYoloLabel("0 0.5 0.5 0.1\n"), Error);
  EXPECT_THROW(ReadYoloLabel("0 0.5 0.5 0.1 abc\n"), Error);
  try {
    ReadYoloLabel("0 0.99 0.5 0.1 0.1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
  }
  EXPECT_THROW(ReadYoloLabel("0 0.5 0.5 0 0.1\n"), Error);
}

TEST(YoloLabelProperty, RoundTripWithinQuantization) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double x0 = u(rng) * 340, y0 = u(rng) * 250;
    const Box box{x0, y0, x0 + 1 + u(rng) * (345 - x0), y0 + 1 + u(rng) * (259 - y0)};
    const Annotation a = AnnotationFromPixelBox(box, kDavis, trial % 3);
    const auto back = ReadYoloLabel(WriteYoloLabel(std::vector<Annotation>{a}), "ref");
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].class_id, trial % 3);
    EXPECT_EQ(back[0].frame_ref, "ref");
    const Box round = PixelBoxFromAnnotation(back[0], kDavis);
    // Six decimals of a normalized coordinate are worth at most 0.5e-6 * 346.
    const double tol = 1e-6 * 346;
    EXPECT_NEAR(round.x_min, box.x_min, tol);
    EXPECT_NEAR(round.x_max, box.x_max, tol);
    EXPECT_NEAR(round.y_min, box.y_min, tol);
    EXPECT_NEAR(round.y_max, box.y_max, tol);
  }
}

TEST(SplitBySubject, FortyEightSubjects) {
  std::vector<std::string> ids;
  for (int i = 0; i < 48; ++i) ids.push_back("s" + std::to_string(i));
  const SplitRatios ratios{38.0 / 48, 5.0 / 48, 5.0 / 48};
  const SubjectSplit split = SplitBySubject(ids, ratios, 3);
  EXPECT_EQ(split.train.size(), 38u);
  EXPECT_EQ(split.val.size(), 5u);
  EXPECT_EQ(split.test.size(), 5u);
  EXPECT_EQ(split, SplitBySubject(ids, ratios, 3));
}

TEST(SplitBySubject, Errors) {
  const std::vector<std::string> ids = {"a", "b"};
  EXPECT_THROW(SplitBySubject(ids, {0.5, 0.5, 0.5}, 0), Error);
  EXPECT_THROW(SplitBySubject(ids, {0.7, 0.15, 0.15}, 0), Error);
  const std::vector<std::string> three = {"a", "b", "c", "a"};
  const SubjectSplit s = SplitBySubject(three, {0.7, 0.15, 0.15}, 0);
  EXPECT_EQ(s.train.size() + s.val.size() + s.test.size(), 3u);
}

TEST(SplitBySubjectProperty, PartitionsAreDisjointAndComplete) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng() % 60;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("subj" + std::to_string(rng() % 1000));
    std::set<std::string> unique(ids.begin(), ids.end());
    if (unique.size() < 3) continue;
    const SubjectSplit s = SplitBySubject(ids, {0.7, 0.15, 0.15}, rng());
    std::set<std::string> seen;
    for (const auto* part : {&s.train, &s.val, &s.test}) {
      EXPECT_FALSE(part->empty());
      for (const auto& id : *part) EXPECT_TRUE(seen.insert(id).second) << id;
    }
    EXPECT_EQ(seen, unique);
  }
}

Recording MakeRecording(const std::string& subject, Eye eye, std::uint64_t seed,
                        double length_ms = 200.0) {
  DiscSynthConfig config;
  config.duration_ms = length_ms;
  config.seed = seed;
  SynthResult r = SynthMovingDisc(kDavis, SinusoidPath({173, 130}, 30, 100), config);
  return {subject, eye, subject + "_" + EyeName(eye) + ".csv", std::move(r.stream),
          std::move(r.truth)};
}

TEST(SampleFrames, DrawsWithoutReplacementPerEye) {
  const std::vector<Recording> recs = {MakeRecording("a", Eye::kLeft, 1),
                                       MakeRecording("a", Eye::kRight, 2),
                                       MakeRecording("b", Eye::kLeft, 3)};
  const SampleResult r = SampleFrames(recs, 5, FrameGenConfig{}, 9);
  EXPECT_TRUE(r.warnings.empty());
  ASSERT_EQ(r.frames.size(), 15u);
  std::set<std::tuple<std::string, Eye, std::size_t>> keys;
  for (const SampledFrame& f : r.frames) {
    EXPECT_GT(f.frame.event_count, 2000u);
    EXPECT_TRUE(keys.insert({f.subject_id, f.eye, f.frame.window.index}).second);
  }
  const SampleResult again = SampleFrames(recs, 5, FrameGenConfig{}, 9, 3);
  ASSERT_EQ(again.frames.size(), r.frames.size());
  for (std::size_t i = 0; i < r.frames.size(); ++i) {
    EXPECT_EQ(again.frames[i].frame, r.frames[i].frame);
  }
}

TEST(SampleFrames, ShortfallWarnsAndEmptyPairThrows) {
  const std::vector<Recording> recs = {MakeRecording("a", Eye::kLeft, 1, 50.0)};
  const SampleResult r = SampleFrames(recs, 20, FrameGenConfig{}, 0);
  EXPECT_EQ(r.frames.size(), 5u);
  ASSERT_EQ(r.warnings.size(), 1u);
  FrameGenConfig closed;
  closed.event_threshold = 1'000'000'000;
  EXPECT_THROW(SampleFrames(recs, 20, closed, 0), Error);
}

TEST(EmitDataset, WritesLayoutAndManifest) {
  testing::TempDir dir;
  std::vector<Recording> recs;
  for (const char* s : {"s1", "s2", "s3", "s4"}) {
    recs.push_back(MakeRecording(s, Eye::kLeft, recs.size() + 1, 60.0));
  }
  recs.back().truth.reset();
  const SampleResult sample = SampleFrames(recs, 2, FrameGenConfig{}, 4);
  const std::vector<std::string> ids = {"s1", "s2", "s3", "s4"};
  const SubjectSplit split = SplitBySubject(ids, {0.5, 0.25, 0.25}, 4);
  const SplitManifest m = EmitDataset(dir.path(), recs, sample.frames, split);
  EXPECT_EQ(m.train.size() + m.val.size() + m.test.size(), 8u);

  for (const Partition p : {Partition::kTrain, Partition::kVal, Partition::kTest}) {
    for (const ManifestEntry& e : m.at(p)) {
      EXPECT_EQ(split.Find(e.subject_id), p);
      EXPECT_TRUE(std::filesystem::exists(dir / e.image));
      const auto labels = ReadYoloLabelFile(dir / e.label);
      EXPECT_EQ(labels.size(), e.boxes);
      EXPECT_EQ(e.boxes, e.subject_id == "s4" ? 0u : 1u);
      EXPECT_EQ(ReadGrayPng(dir / e.image).geometry, kDavis);
    }
  }
  std::ifstream in(dir / "manifest.json");
  const auto doc = nlohmann::json::parse(in);
  EXPECT_EQ(doc["subjects"]["train"].size(), split.train.size());
  EXPECT_EQ(doc["images"]["train"].size(), m.train.size());
}

TEST(EmitDataset, LabelCentreMatchesTruthAtWindowMidpoint) {
  testing::TempDir dir;
  const std::vector<Recording> recs = {MakeRecording("s1", Eye::kRight, 5, 60.0)};
  const SampleResult sample = SampleFrames(recs, 3, FrameGenConfig{}, 1);
  SubjectSplit split;
  split.train = {"s1"};
  const SplitManifest m = EmitDataset(dir.path(), recs, sample.frames, split);
  ASSERT_EQ(m.train.size(), 3u);
  for (const ManifestEntry& e : m.train) {
    const auto labels = ReadYoloLabelFile(dir / e.label);
    ASSERT_EQ(labels.size(), 1u);
    const Box box = PixelBoxFromAnnotation(labels[0], kDavis);
    const Point2 c = recs[0].truth->CenterAt(0.5 * (e.t_start_us + e.t_end_us) / 1000.0);
    EXPECT_NEAR(box.center_x(), c.x, 1e-3);
    EXPECT_NEAR(box.center_y(), c.y, 1e-3);
    EXPECT_NEAR(box.width(), 16.0, 1e-3);
  }
}

}  // namespace
}  // namespace evpupil
