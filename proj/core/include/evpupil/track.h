// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef EVPUPIL_TRACK_H_
#define EVPUPIL_TRACK_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evpupil/detect.h"
#include "evpupil/framegen.h"

namespace evpupil {

enum class PointSource { kDetected, kInterpolated };

struct TrajectoryPoint {
  std::size_t frame_index = 0;
  double t_mid_us = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  PointSource source = PointSource::kDetected;
  double confidence = 0.0;

  friend bool operator==(const TrajectoryPoint&,
                         const TrajectoryPoint&) = default;
};

// Run of consecutive frames without a point.
struct Gap {
  std::size_t first_missing = 0;
  std::size_t missing = 0;

  friend bool operator==(const Gap&, const Gap&) = default;
};

// Points are strictly increasing in frame index (and therefore time). Window
// i spans [origin_us + i * window_us, origin_us + (i + 1) * window_us).
struct Trajectory {
  std::uint64_t origin_us = 0;
  std::uint64_t window_us = 0;
  std::vector<TrajectoryPoint> points;

  double MidpointUs(std::size_t frame_index) const;
  std::vector<Gap> Gaps() const;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct BuildResult {
  Trajectory trajectory;
  std::vector<std::string> warnings;
};

// Parses the trailing frame number out of refs like "frame_000123.png".
std::optional<std::size_t> FrameIndexFromRef(std::string_view frame_ref);

// One point per window that has a detection, at the window midpoint. When a
// window has several detections the most confident wins and a warning is
// recorded. Throws kNotFound when a detection references an unplanned window.
BuildResult BuildTrajectory(std::span<const Detection> detections,
                            std::span<const WindowPlan> windows);

// Fills gaps of at most max_gap_frames windows by linear interpolation in
// time between the bracketing points. Longer gaps stay open.
Trajectory InterpolateGaps(const Trajectory& trajectory,
                           std::size_t max_gap_frames);

struct VelocitySample {
  double t_mid_us = 0.0;
  double speed_px_s = 0.0;
  std::optional<double> speed_deg_s;
};

// Central differences inside, one-sided differences at the ends. Angular
// speed is reported only with a px-per-degree calibration. Throws
// kInvalidArgument with fewer than two points.
std::vector<VelocitySample> ComputeVelocity(
    const Trajectory& trajectory,
    std::optional<double> px_per_degree = std::nullopt);

struct SaccadeInterval {
  double onset_us = 0.0;
  double offset_us = 0.0;
  double peak_deg_s = 0.0;

  friend bool operator==(const SaccadeInterval&,
                         const SaccadeInterval&) = default;
};

// Maximal runs of consecutive samples with angular speed >= threshold whose
// span (offset - onset) is at least min_duration_ms. Throws
// kInvalidArgument when a sample has no angular speed.
std::vector<SaccadeInterval> FlagSaccadeCandidates(
    std::span<const VelocitySample> velocities, double threshold_deg_s = 300.0,
    double min_duration_ms = 10.0);

// t_us,cx,cy,source,confidence,speed_px_s[,speed_deg_s]
void WriteTrajectoryCsv(std::ostream& out, const Trajectory& trajectory,
                        std::span<const VelocitySample> velocities);
// onset_us,offset_us,peak_deg_s
void WriteSaccadeCsv(std::ostream& out,
                     std::span<const SaccadeInterval> intervals);

}  // namespace evpupil

#endif  // EVPUPIL_TRACK_H_
