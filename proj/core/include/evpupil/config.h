// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef EVPUPIL_CONFIG_H_
#define EVPUPIL_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "evpupil/dataset.h"
#include "evpupil/detect.h"
#include "evpupil/event_io.h"
#include "evpupil/framegen.h"
#include "evpupil/metrics.h"

namespace evpupil {

struct DatasetConfig {
  std::size_t frames_per_eye = 20;
  SplitRatios ratios;

  friend bool operator==(const DatasetConfig&, const DatasetConfig&) = default;
};

struct TrackConfig {
  std::size_t max_gap_frames = 2;
  std::optional<double> px_per_degree;
  double saccade_threshold_deg_s = 300.0;
  double min_saccade_ms = 10.0;

  friend bool operator==(const TrackConfig&, const TrackConfig&) = default;
};

// Everything a pipeline run depends on. Serializes to JSON losslessly.
struct PipelineConfig {
  SensorGeometry geometry;
  FrameGenConfig framegen;
  DatasetConfig dataset;
  CentroidConfig centroid;
  MatchConfig match;
  TrackConfig track;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = all cores

  // Checks every component invariant; throws kInvalidArgument.
  void Validate() const;

  friend bool operator==(const PipelineConfig&,
                         const PipelineConfig&) = default;
};

std::string PipelineConfigToJson(const PipelineConfig& config);
// Missing keys keep their defaults; unknown keys are rejected.
PipelineConfig PipelineConfigFromJson(const std::string& text);
PipelineConfig LoadPipelineConfig(const std::filesystem::path& path);

}  // namespace evpupil

#endif  // EVPUPIL_CONFIG_H_
