// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef EVPUPIL_FRAMEGEN_H_
#define EVPUPIL_FRAMEGEN_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evpupil/event_io.h"

namespace evpupil {

// Half-open accumulation window [t_start, t_end) in microseconds.
struct WindowPlan {
  std::uint64_t t_start = 0;
  std::uint64_t t_end = 0;
  std::size_t index = 0;

  double MidpointUs() const { return 0.5 * static_cast<double>(t_start + t_end); }

  friend bool operator==(const WindowPlan&, const WindowPlan&) = default;
};

enum class CollisionRule { kLastWriteWins };

struct FrameGenConfig {
  double duration_ms = 10.0;
  // A window emits a frame only when it holds strictly more events than this.
  std::uint64_t event_threshold = 2000;
  std::uint8_t background_intensity = 128;
  CollisionRule collision_rule = CollisionRule::kLastWriteWins;

  // Throws kInvalidArgument on a nonpositive duration or a background that
  // collides with the ON/OFF intensities.
  void Validate() const;
  // Window length in whole microseconds.
  std::uint64_t DurationUs() const;

  friend bool operator==(const FrameGenConfig&,
                         const FrameGenConfig&) = default;
};

inline constexpr std::uint8_t kOnIntensity = 255;
inline constexpr std::uint8_t kOffIntensity = 0;

// 8-bit grayscale raster, row-major, height x width.
struct Frame {
  SensorGeometry geometry;
  WindowPlan window;
  std::uint64_t event_count = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(std::uint32_t row, std::uint32_t col) const {
    return pixels[static_cast<std::size_t>(row) * geometry.width + col];
  }

  friend bool operator==(const Frame&, const Frame&) = default;
};

// ceil((t_max - t_min) / duration) windows anchored at t_min, at least one.
std::vector<WindowPlan> PlanWindows(std::uint64_t t_min, std::uint64_t t_max,
                                    std::uint64_t duration_us);

// Rasterizes one window's events onto a background canvas. Returns nullopt
// when the gate rejects the window. Events must be in time order.
std::optional<Frame> Accumulate(std::span<const Event> events,
                                const WindowPlan& window,
                                const SensorGeometry& geometry,
                                const FrameGenConfig& config);

struct WindowSlice {
  WindowPlan window;
  std::span<const Event> events;
};

// Plans windows over the stream and hands each one its events. Events
// stamped exactly at the end of the final window (possible only when the
// span divides evenly) are folded into that window so that every event lands
// in exactly one slice. Throws kEmptyStream on an empty stream.
std::vector<WindowSlice> SliceWindows(const EventStream& stream,
                                      std::uint64_t duration_us);

// Splits the stream into planned windows and accumulates each one. Output is
// in window order and identical for any thread count (0 = all cores).
std::vector<Frame> GenerateFrames(const EventStream& stream,
                                  const FrameGenConfig& config,
                                  unsigned threads = 1);

// Frame file name: frame_{index:06}.png
std::string FrameFileName(std::size_t index);

// Sidecar rows: index,t_start_us,t_end_us,event_count (with header).
void WriteFrameSidecar(std::ostream& out, std::span<const Frame> frames);

struct SidecarRow {
  std::size_t index = 0;
  std::uint64_t t_start_us = 0;
  std::uint64_t t_end_us = 0;
  std::uint64_t event_count = 0;

  friend bool operator==(const SidecarRow&, const SidecarRow&) = default;
};
std::vector<SidecarRow> ReadFrameSidecar(std::istream& in);

}  // namespace evpupil

#endif  // EVPUPIL_FRAMEGEN_H_
