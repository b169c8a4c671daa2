// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#include "evpupil/metrics.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "evpupil/error.h"
#include "testing/oracles.h"

namespace evpupil {
namespace {

TEST(Iou, HalfOverlap) {
  EXPECT_DOUBLE_EQ(Iou({0, 0, 10, 10}, {5, 0, 15, 10}), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(Iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
  EXPECT_DOUBLE_EQ(Iou({0, 0, 10, 10}, {10, 0, 20, 10}), 0.0);
  EXPECT_DOUBLE_EQ(Iou({0, 0, 10, 10}, {20, 20, 30, 30}), 0.0);
  EXPECT_THROW(Iou({0, 0, 0, 10}, {0, 0, 1, 1}), Error);
}

Box RandomBox(std::mt19937_64& rng, int extent) {
  const int x0 = static_cast<int>(rng() % extent), y0 = static_cast<int>(rng() % extent);
  return {static_cast<double>(x0), static_cast<double>(y0),
          static_cast<double>(x0 + 1 + rng() % extent),
          static_cast<double>(y0 + 1 + rng() % extent)};
}

TEST(IouProperty, SymmetricBoundedAndMatchesCellCount) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 2000; ++trial) {
    const Box a = RandomBox(rng, 20), b = RandomBox(rng, 20);
    const double ab = Iou(a, b);
    EXPECT_DOUBLE_EQ(ab, Iou(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_DOUBLE_EQ(Iou(a, a), 1.0);
    EXPECT_NEAR(ab, testing::CellCountIou(a, b), 1e-12);
  }
}

TEST(Match, GreedyByConfidence) {
  const std::vector<GroundTruth> truths = {{"f", 0, {0, 0, 10, 10}}};
  const std::vector<Detection> dets = {{"f", 0, {0, 0, 10, 10}, 0.6},
                                       {"f", 0, {1, 0, 10, 10}, 0.9}};
  const MatchResult m = MatchDetections(dets, truths, {});
  ASSERT_EQ(m.detections.size(), 2u);
  EXPECT_EQ(m.detections[0].input_index, 1u);
  EXPECT_TRUE(m.detections[0].true_positive);
  EXPECT_FALSE(m.detections[1].true_positive);
  EXPECT_EQ(m.tp(), 1u);
  EXPECT_EQ(m.fp(), 1u);
  EXPECT_EQ(m.fn(), 0u);
}

TEST(Match, EqualConfidencePrefersBetterOverlap) {
  const std::vector<GroundTruth> truths = {{"f", 0, {0, 0, 10, 10}}};
  const std::vector<Detection> dets = {{"f", 0, {3, 0, 10, 10}, 0.8},
                                       {"f", 0, {0, 0, 10, 10}, 0.8}};
  const MatchResult m = MatchDetections(dets, truths, {});
  EXPECT_EQ(m.detections[0].input_index, 1u);
  EXPECT_DOUBLE_EQ(m.detections[0].iou, 1.0);
}

TEST(Match, FramesAndClassesDoNotMix) {
  const std::vector<GroundTruth> truths = {{"f", 0, {0, 0, 10, 10}},
                                           {"g", 1, {0, 0, 10, 10}}};
  const std::vector<Detection> dets = {{"g", 0, {0, 0, 10, 10}, 0.9},
                                       {"f", 1, {0, 0, 10, 10}, 0.9}};
  const MatchResult m = MatchDetections(dets, truths, {});
  EXPECT_EQ(m.tp(), 0u);
  EXPECT_EQ(m.fn(), 2u);
}

TEST(Match, ConfidenceThresholdDropsLowScores) {
  const std::vector<GroundTruth> truths = {{"f", 0, {0, 0, 10, 10}}};
  const std::vector<Detection> dets = {{"f", 0, {0, 0, 10, 10}, 0.2}};
  EXPECT_TRUE(MatchDetections(dets, truths, {0.5, 0.25}).detections.empty());
  EXPECT_EQ(MatchDetections(dets, truths, {0.5, 0.2}).tp(), 1u);
}

TEST(PrecisionRecall, Conventions) {
  MatchResult none;
  none.truth_matched = {false, false};
  const auto prf = ComputePrecisionRecallF1(none);
  EXPECT_DOUBLE_EQ(prf.precision, 1.0);
  EXPECT_DOUBLE_EQ(prf.recall, 0.0);
  EXPECT_DOUBLE_EQ(prf.f1, 0.0);
  EXPECT_DOUBLE_EQ(F1Score(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(F1Score(1.0, 1.0), 1.0);
}

TEST(PrecisionRecall, HarmonicMeanExamples) {
  EXPECT_NEAR(F1Score(0.965, 0.919), 0.9414, 1e-4);
  EXPECT_NEAR(F1Score(0.950, 0.920), 0.9348, 1e-4);
  EXPECT_NEAR(F1Score(0.949, 0.927), 0.9379, 1e-4);
  EXPECT_NEAR(F1Score(0.944, 0.938), 0.9410, 1e-4);
}

TEST(PrecisionRecall, VacuousCaseIsPerfect) {
  const auto prf = ComputePrecisionRecallF1(MatchResult{});
  EXPECT_DOUBLE_EQ(prf.precision, 1.0);
  EXPECT_DOUBLE_EQ(prf.recall, 1.0);
  EXPECT_DOUBLE_EQ(prf.f1, 1.0);
}

TEST(AveragePrecision, HandComputedCurve) {
  const std::vector<GroundTruth> truths = {{"a", 0, {0, 0, 10, 10}},
                                           {"b", 0, {0, 0, 10, 10}}};
  const std::vector<Detection> dets = {{"a", 0, {0, 0, 10, 10}, 0.9},
                                       {"c", 0, {0, 0, 10, 10}, 0.8},
                                       {"b", 0, {0, 0, 10, 10}, 0.7}};
  EXPECT_NEAR(AveragePrecision(dets, truths), 5.0 / 6.0, 1e-12);
  const auto curve = PrecisionRecallCurve(dets, truths);
  ASSERT_EQ(curve.size(), 3u);
  EXPECT_DOUBLE_EQ(curve[1].precision, 0.5);
  EXPECT_DOUBLE_EQ(curve[2].recall, 1.0);
}

TEST(AveragePrecision, TiesCollapseToOnePoint) {
  const std::vector<GroundTruth> truths = {{"a", 0, {0, 0, 10, 10}}};
  const std::vector<Detection> dets = {{"a", 0, {0, 0, 10, 10}, 0.5},
                                       {"x", 0, {0, 0, 10, 10}, 0.5}};
  const auto curve = PrecisionRecallCurve(dets, truths);
  ASSERT_EQ(curve.size(), 1u);
  EXPECT_DOUBLE_EQ(curve[0].precision, 0.5);
  EXPECT_DOUBLE_EQ(AveragePrecision(dets, truths), 0.5);
}

TEST(AveragePrecision, NoTruthsIsAnError) {
  EXPECT_THROW(AveragePrecision({}, {}), Error);
  EXPECT_DOUBLE_EQ(AveragePrecision({}, std::vector<GroundTruth>{{"a", 0, {0, 0, 1, 1}}}),
                   0.0);
}

struct Instance {
  std::vector<Detection> dets;
  std::vector<GroundTruth> truths;
};

Instance RandomInstance(std::mt19937_64& rng) {
  Instance inst;
  const int frames = 1 + static_cast<int>(rng() % 3);
  const std::size_t nt = rng() % 5, nd = rng() % 6;
  for (std::size_t i = 0; i < nt; ++i) {
    inst.truths.push_back({"f" + std::to_string(rng() % frames),
                           static_cast<int>(rng() % 2), RandomBox(rng, 8)});
  }
  for (std::size_t i = 0; i < nd; ++i) {
    // Coarse confidences so ties are common.
    inst.dets.push_back({"f" + std::to_string(rng() % frames), static_cast<int>(rng() % 2),
                         RandomBox(rng, 8), static_cast<double>(rng() % 5) / 4.0});
  }
  return inst;
}

TEST(MatchProperty, AgreesWithExhaustiveOracle) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    const Instance inst = RandomInstance(rng);
    const double iou_thr = (rng() % 2) ? 0.5 : 0.3;
    const MatchResult m = MatchDetections(inst.dets, inst.truths, {iou_thr, 0.25});
    const testing::MatchCounts expected =
        testing::EnumerateMatchCounts(inst.dets, inst.truths, iou_thr, 0.25);
    EXPECT_EQ((testing::MatchCounts{m.tp(), m.fp(), m.fn()}), expected) << trial;
  }
}

TEST(MatchProperty, CountsAreConserved) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 300; ++trial) {
    const Instance inst = RandomInstance(rng);
    const MatchResult m = MatchDetections(inst.dets, inst.truths, {0.5, 0.25});
    std::size_t kept = 0;
    for (const auto& d : inst.dets) kept += d.confidence >= 0.25;
    EXPECT_EQ(m.tp() + m.fp(), kept);
    EXPECT_EQ(m.tp() + m.fn(), inst.truths.size());
    std::vector<int> used(inst.truths.size(), 0);
    for (const auto& o : m.detections) {
      if (o.matched_truth) ++used[*o.matched_truth];
    }
    for (int u : used) EXPECT_LE(u, 1);
  }
}

TEST(AveragePrecisionProperty, AddingTruePositiveDoesNotLowerAp) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 200; ++trial) {
    Instance inst = RandomInstance(rng);
    inst.truths.push_back({"extra", 0, {0, 0, 4, 4}});
    const double before = AveragePrecision(inst.dets, inst.truths);
    // A perfect detection scored above everything else.
    inst.dets.push_back({"extra", 0, {0, 0, 4, 4}, 2.0});
    const double after = AveragePrecision(inst.dets, inst.truths);
    EXPECT_GE(after + 1e-12, before) << trial;
    EXPECT_GE(before, 0.0);
    EXPECT_LE(after, 1.0);
  }
}

TEST(Evaluate, PerfectDetectionsScoreOne) {
  std::vector<GroundTruth> truths;
  std::vector<Detection> dets;
  for (int i = 0; i < 10; ++i) {
    const Box b{double(i), 1, double(i + 5), 9};
    truths.push_back({"f" + std::to_string(i), i % 2, b});
    dets.push_back({"f" + std::to_string(i), i % 2, b, 0.9});
  }
  const EvalReport r = Evaluate(dets, truths, {});
  EXPECT_DOUBLE_EQ(r.map, 1.0);
  EXPECT_DOUBLE_EQ(r.f1, 1.0);
  EXPECT_EQ(r.ap.size(), 2u);
  std::stringstream json;
  WriteReportJson(json, r);
  const auto doc = nlohmann::json::parse(json.str());
  EXPECT_DOUBLE_EQ(doc["map"].get<double>(), 1.0);
  EXPECT_EQ(doc["tp"].get<int>(), 10);
}

TEST(Evaluate, EmptyDetectionsRecallZero) {
  const std::vector<GroundTruth> truths = {{"f", 0, {0, 0, 3, 3}}};
  const EvalReport r = Evaluate({}, truths, {});
  EXPECT_DOUBLE_EQ(r.recall, 0.0);
  EXPECT_DOUBLE_EQ(r.precision, 1.0);
  EXPECT_DOUBLE_EQ(r.map, 0.0);
  EXPECT_EQ(r.fn, 1u);
}

TEST(PrCurve, CsvHeader) {
  std::stringstream out;
  const std::vector<PrPoint> curve = {{0.5, 1.0, 0.25}};
  WritePrCurveCsv(out, curve);
  EXPECT_EQ(out.str(), "confidence,precision,recall\n0.5,1,0.25\n");
}

}  // namespace
}  // namespace evpupil
