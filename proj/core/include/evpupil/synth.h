// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef EVPUPIL_SYNTH_H_
#define EVPUPIL_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

#include "evpupil/event_io.h"

namespace evpupil {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

// Disc center (pixels) as a function of time in milliseconds.
using PathFn = std::function<Point2(double t_ms)>;

PathFn StationaryPath(Point2 center);
// Moves at constant speed from `from` (t=0) to `to` (t=duration_ms), then
// stays at `to`.
PathFn LinearPath(Point2 from, Point2 to, double duration_ms);
// Horizontal oscillation x(t) = center.x + amplitude * sin(2 pi t / period).
PathFn SinusoidPath(Point2 center, double amplitude_px, double period_ms);
// Minimum-jerk step from `from` to `to` starting at onset_ms and lasting
// step_ms; stationary before and after.
PathFn StepPath(Point2 from, Point2 to, double onset_ms, double step_ms);

struct GroundTruthSample {
  double t_ms = 0.0;
  Point2 center;

  friend bool operator==(const GroundTruthSample&,
                         const GroundTruthSample&) = default;
};

// True disc centers sampled every millisecond from 0 to duration inclusive.
class GroundTruthTrack {
 public:
  GroundTruthTrack() = default;
  GroundTruthTrack(double radius_px, std::vector<GroundTruthSample> samples);

  double radius() const { return radius_; }
  const std::vector<GroundTruthSample>& samples() const { return samples_; }

  // Linear interpolation between the bracketing samples; clamps at the ends.
  Point2 CenterAt(double t_ms) const;

  friend bool operator==(const GroundTruthTrack&,
                         const GroundTruthTrack&) = default;

 private:
  double radius_ = 0.0;
  std::vector<GroundTruthSample> samples_;
};

// CSV columns: t_ms,cx,cy,radius.
void WriteGroundTruthCsv(std::ostream& out, const GroundTruthTrack& track);
GroundTruthTrack ReadGroundTruthCsv(std::istream& in);
GroundTruthTrack ReadGroundTruthFile(const std::filesystem::path& path);

struct DiscSynthConfig {
  double radius_px = 8.0;
  double event_rate_per_ms = 300.0;
  double duration_ms = 1000.0;
  // Illumination flicker, expressed as the normal edge speed (px/ms) at which
  // motion-driven and flicker-driven events are equally likely. Each boundary
  // event takes the motion polarity (leading edge ON, trailing edge OFF) with
  // probability |v_n| / (|v_n| + flicker_speed) and a random polarity
  // otherwise. Zero gives pure edge polarity; a stationary disc then flickers.
  double flicker_speed_px_per_ms = 10.0;
  std::uint64_t seed = 0;
};

struct SynthResult {
  EventStream stream;
  GroundTruthTrack truth;
};

// Emits events on the boundary of a disc that follows `path`. Throws
// kInvalidArgument for nonpositive radius/rate/duration and kOutOfRange when
// the disc leaves the sensor. Deterministic for a fixed seed.
SynthResult SynthMovingDisc(const SensorGeometry& geometry, const PathFn& path,
                            const DiscSynthConfig& config);

}  // namespace evpupil

#endif  // EVPUPIL_SYNTH_H_
