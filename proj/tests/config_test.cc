// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#include "evpupil/config.h"

#include <gtest/gtest.h>

#include "evpupil/error.h"
#include "testing/temp_dir.h"

namespace evpupil {
namespace {

ErrorCode CodeOf(const std::string& json) {
  try {
    PipelineConfigFromJson(json);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kMismatch;  // sentinel: nothing thrown
}

TEST(PipelineConfig, DefaultsAreValid) {
  PipelineConfig c;
  EXPECT_NO_THROW(c.Validate());
  EXPECT_EQ(c.geometry, (SensorGeometry{346, 260}));
  EXPECT_EQ(c.framegen.event_threshold, 2000u);
  EXPECT_DOUBLE_EQ(c.match.iou_threshold, 0.5);
  EXPECT_DOUBLE_EQ(c.match.confidence_threshold, 0.25);
  EXPECT_FALSE(c.track.px_per_degree.has_value());
  EXPECT_EQ(PipelineConfigFromJson("{}"), c);
}

TEST(PipelineConfig, JsonRoundTrip) {
  PipelineConfig c;
  c.geometry = {640, 480};
  c.framegen.duration_ms = 2.5;
  c.framegen.event_threshold = 17;
  c.framegen.background_intensity = 100;
  c.centroid.background_intensity = 100;
  c.centroid.box_sigma = 1.5;
  c.dataset.frames_per_eye = 3;
  c.dataset.ratios = {0.5, 0.25, 0.25};
  c.match = {0.4, 0.1};
  c.track.px_per_degree = 12.5;
  c.track.max_gap_frames = 0;
  c.seed = 12345678901234ULL;
  c.threads = 3;
  EXPECT_EQ(PipelineConfigFromJson(PipelineConfigToJson(c)), c);
  PipelineConfig defaults;
  EXPECT_EQ(PipelineConfigFromJson(PipelineConfigToJson(defaults)), defaults);
}

TEST(PipelineConfig, FramegenBackgroundPropagatesToCentroid) {
  const PipelineConfig c =
      PipelineConfigFromJson(R"({"framegen": {"background_intensity": 90}})");
  EXPECT_EQ(c.centroid.background_intensity, 90);
}

TEST(PipelineConfig, RejectsBadDocuments) {
  EXPECT_EQ(CodeOf("{"), ErrorCode::kParse);
  EXPECT_EQ(CodeOf(R"({"bogus": 1})"), ErrorCode::kSchema);
  EXPECT_EQ(CodeOf(R"({"framegen": {"durationms": 1}})"), ErrorCode::kSchema);
  EXPECT_EQ(CodeOf(R"({"framegen": {"duration_ms": "ten"}})"), ErrorCode::kSchema);
  EXPECT_EQ(CodeOf(R"({"framegen": {"collision_rule": "first"}})"), ErrorCode::kSchema);
  EXPECT_EQ(CodeOf(R"({"framegen": {"duration_ms": 0}})"), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf(R"({"match": {"iou_threshold": 0}})"), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf(R"({"dataset": {"ratios": {"train": 0.9}}})"),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf(R"({"track": {"px_per_degree": -1}})"), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf(R"({"centroid": {"background_intensity": 7}})"),
            ErrorCode::kInvalidArgument);
}

TEST(PipelineConfig, LoadFromFile) {
  testing::TempDir dir;
  testing::WriteFileBytes(dir / "c.json", R"({"seed": 5})");
  EXPECT_EQ(LoadPipelineConfig(dir / "c.json").seed, 5u);
  EXPECT_THROW(LoadPipelineConfig(dir / "missing.json"), Error);
}

}  // namespace
}  // namespace evpupil
