// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef EVPUPIL_DETECT_H_
#define EVPUPIL_DETECT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evpupil/box.h"
#include "evpupil/event_io.h"
#include "evpupil/framegen.h"

namespace evpupil {

struct Detection {
  std::string frame_ref;
  int class_id = 0;
  Box box;
  double confidence = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct CentroidConfig {
  // Minimum number of non-background pixels for a detection.
  std::uint64_t min_events = 20;
  // Box half-extent per axis, in standard deviations of the dominant
  // polarity's pixel coordinates.
  double box_sigma = 2.0;
  std::uint8_t background_intensity = 128;

  friend bool operator==(const CentroidConfig&,
                         const CentroidConfig&) = default;
};

// Center-of-gravity baseline. The polarity with more pixels wins (ties go to
// ON); the center is the mean of its pixel coordinates and the box spans
// center +/- box_sigma * stddev, at least half a pixel each way, clipped to
// [0, width] x [0, height]. Confidence is the dominant share of all
// non-background pixels.
std::optional<Detection> CentroidDetect(std::span<const std::uint8_t> pixels,
                                        const SensorGeometry& geometry,
                                        const CentroidConfig& config,
                                        std::string frame_ref = {});
std::optional<Detection> CentroidDetect(const Frame& frame,
                                        const CentroidConfig& config);

// Throws kSchema when the box is degenerate, the confidence leaves [0, 1],
// or (with bounds) the box leaves the sensor.
void ValidateDetection(const Detection& detection,
                       const std::optional<SensorGeometry>& bounds = {});

// Detections JSON: [{"frame": str, "class": int, "box": [x0,y0,x1,y1],
// "conf": num}, ...]. "class" defaults to 0 when absent.
std::vector<Detection> LoadDetections(
    std::istream& in, const std::optional<SensorGeometry>& bounds = {});
std::vector<Detection> LoadDetectionsFile(
    const std::filesystem::path& path,
    const std::optional<SensorGeometry>& bounds = {});
void WriteDetections(std::ostream& out, std::span<const Detection> detections);
void WriteDetectionsFile(const std::filesystem::path& path,
                         std::span<const Detection> detections);

std::map<std::string, std::vector<Detection>> GroupByFrame(
    std::span<const Detection> detections);

}  // namespace evpupil

#endif  // EVPUPIL_DETECT_H_
