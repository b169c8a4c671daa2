// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#include "evpupil/framegen.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "csv_util.h"
#include "evpupil/error.h"
#include "evpupil/parallel.h"

namespace evpupil {

void FrameGenConfig::Validate() const {
  if (!(duration_ms > 0.0) || !std::isfinite(duration_ms)) {
    throw Error(ErrorCode::kInvalidArgument, "duration_ms must be > 0");
  }
  if (DurationUs() == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "duration_ms must be at least 1 microsecond");
  }
  if (background_intensity == kOnIntensity ||
      background_intensity == kOffIntensity) {
    throw Error(ErrorCode::kInvalidArgument,
                "background intensity must differ from 0 and 255");
  }
}

std::uint64_t FrameGenConfig::DurationUs() const {
  if (!(duration_ms > 0.0)) return 0;
  return static_cast<std::uint64_t>(std::llround(duration_ms * 1000.0));
}

std::vector<WindowPlan> PlanWindows(std::uint64_t t_min, std::uint64_t t_max,
                                    std::uint64_t duration_us) {
  if (duration_us == 0) {
    throw Error(ErrorCode::kInvalidArgument, "window duration must be > 0");
  }
  if (t_max < t_min) {
    throw Error(ErrorCode::kInvalidArgument, "t_max < t_min");
  }
  const std::uint64_t span = t_max - t_min;
  const std::uint64_t count =
      std::max<std::uint64_t>(1, (span + duration_us - 1) / duration_us);
  std::vector<WindowPlan> windows;
  windows.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t start = t_min + i * duration_us;
    windows.push_back({start, start + duration_us, static_cast<std::size_t>(i)});
  }
  return windows;
}

std::optional<Frame> Accumulate(std::span<const Event> events,
                                const WindowPlan& window,
                                const SensorGeometry& geometry,
                                const FrameGenConfig& config) {
  if (events.size() <= config.event_threshold) return std::nullopt;
  Frame frame;
  frame.geometry = geometry;
  frame.window = window;
  frame.event_count = events.size();
  frame.pixels.assign(geometry.PixelCount(), config.background_intensity);
  const std::size_t width = geometry.width;
  std::uint8_t* const px = frame.pixels.data();
  for (const Event& e : events) {
    px[static_cast<std::size_t>(e.y) * width + e.x] =
        e.p == Polarity::kOn ? kOnIntensity : kOffIntensity;
  }
  return frame;
}

std::vector<WindowSlice> SliceWindows(const EventStream& stream,
                                      std::uint64_t duration_us) {
  if (stream.empty()) throw Error(ErrorCode::kEmptyStream, "empty stream");
  const std::vector<WindowPlan> windows =
      PlanWindows(stream.t_min(), stream.t_max(), duration_us);
  const std::span<const Event> events = stream.events();
  std::vector<WindowSlice> slices;
  slices.reserve(windows.size());
  auto begin = events.begin();
  for (std::size_t i = 0; i < windows.size(); ++i) {
    auto end = events.end();
    if (i + 1 < windows.size()) {
      end = std::lower_bound(
          begin, events.end(), windows[i].t_end,
          [](const Event& e, std::uint64_t t) { return e.t < t; });
    }
    slices.push_back({windows[i], std::span<const Event>(begin, end)});
    begin = end;
  }
  return slices;
}

std::vector<Frame> GenerateFrames(const EventStream& stream,
                                  const FrameGenConfig& config,
                                  unsigned threads) {
  config.Validate();
  const std::vector<WindowSlice> slices =
      SliceWindows(stream, config.DurationUs());
  std::vector<std::optional<Frame>> slots(slices.size());
  ParallelFor(slices.size(), threads, [&](std::size_t i) {
    slots[i] = Accumulate(slices[i].events, slices[i].window,
                          stream.geometry(), config);
  });

  std::vector<Frame> frames;
  for (auto& slot : slots) {
    if (slot) frames.push_back(std::move(*slot));
  }
  return frames;
}

std::string FrameFileName(std::size_t index) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "frame_%06zu.png", index);
  return buf;
}

void WriteFrameSidecar(std::ostream& out, std::span<const Frame> frames) {
  out << "index,t_start_us,t_end_us,event_count\n";
  for (const Frame& f : frames) {
    out << f.window.index << ',' << f.window.t_start << ',' << f.window.t_end
        << ',' << f.event_count << '\n';
  }
}

std::vector<SidecarRow> ReadFrameSidecar(std::istream& in) {
  std::vector<SidecarRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = internal::Trim(internal::StripLineEnding(line));
    if (body.empty()) continue;
    const auto fields = internal::SplitFields(body);
    if (line_no == 1 && fields[0] == "index") continue;
    if (fields.size() != 4) {
      throw Error(ErrorCode::kParse,
                  "sidecar line " + std::to_string(line_no) +
                      ": expected index,t_start_us,t_end_us,event_count");
    }
    const auto index = internal::ParseUint(fields[0]);
    const auto start = internal::ParseUint(fields[1]);
    const auto end = internal::ParseUint(fields[2]);
    const auto count = internal::ParseUint(fields[3]);
    if (!index || !start || !end || !count || *end <= *start) {
      throw Error(ErrorCode::kParse,
                  "sidecar line " + std::to_string(line_no) + ": bad values");
    }
    rows.push_back({static_cast<std::size_t>(*index), *start, *end, *count});
  }
  return rows;
}

}  // namespace evpupil
