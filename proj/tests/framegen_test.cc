// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#include "evpupil/framegen.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "evpupil/error.h"
#include "testing/oracles.h"

namespace evpupil {
namespace {

const SensorGeometry kDavis{346, 260};

std::vector<Event> Repeat(std::size_t n, std::uint64_t t0, std::uint64_t dt) {
  std::vector<Event> events;
  for (std::size_t i = 0; i < n; ++i) {
    events.push_back({t0 + i * dt, static_cast<std::uint16_t>(i % 346),
                      static_cast<std::uint16_t>((i / 346) % 260), Polarity::kOn});
  }
  return events;
}

TEST(PlanWindows, CountIsCeilOfSpan) {
  EXPECT_EQ(PlanWindows(0, 25'000, 10'000).size(), 3u);
  EXPECT_EQ(PlanWindows(0, 20'000, 10'000).size(), 2u);
  EXPECT_EQ(PlanWindows(5'000, 5'000, 10'000).size(), 1u);
  EXPECT_EQ(PlanWindows(1, 10'001, 10'000).size(), 1u);
  EXPECT_EQ(PlanWindows(1, 10'002, 10'000).size(), 2u);
}

TEST(PlanWindows, WindowsAreAnchoredAndContiguous) {
  const auto w = PlanWindows(7, 35'000, 10'000);
  ASSERT_EQ(w.size(), 4u);
  EXPECT_EQ(w.front().t_start, 7u);
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_EQ(w[i].index, i);
    EXPECT_EQ(w[i].t_end - w[i].t_start, 10'000u);
    if (i > 0) EXPECT_EQ(w[i].t_start, w[i - 1].t_end);
  }
  EXPECT_DOUBLE_EQ(w[0].MidpointUs(), 5'007.0);
}

TEST(PlanWindows, RejectsBadArguments) {
  EXPECT_THROW(PlanWindows(0, 10, 0), Error);
  EXPECT_THROW(PlanWindows(10, 0, 5), Error);
}

TEST(FrameGenConfig, ValidatesFields) {
  FrameGenConfig c;
  EXPECT_NO_THROW(c.Validate());
  EXPECT_EQ(c.DurationUs(), 10'000u);
  c.background_intensity = 255;
  EXPECT_THROW(c.Validate(), Error);
  c.background_intensity = 0;
  EXPECT_THROW(c.Validate(), Error);
  c = FrameGenConfig{};
  c.duration_ms = 0.0;
  EXPECT_THROW(c.Validate(), Error);
  c.duration_ms = -3.0;
  EXPECT_THROW(c.Validate(), Error);
}

TEST(Accumulate, GateIsStrict) {
  const SensorGeometry g{346, 260};
  FrameGenConfig config;
  const WindowPlan w{0, 10'000, 0};
  const auto at = Repeat(2000, 0, 1);
  EXPECT_FALSE(Accumulate(at, w, g, config).has_value());
  const auto above = Repeat(2001, 0, 1);
  const auto frame = Accumulate(above, w, g, config);
  ASSERT_TRUE(frame.has_value());
  EXPECT_EQ(frame->event_count, 2001u);
}

TEST(Accumulate, LastWriteWinsAndBackground) {
  FrameGenConfig config;
  config.event_threshold = 0;
  const SensorGeometry g{4, 3};
  const std::vector<Event> events = {
      {0, 1, 1, Polarity::kOn}, {1, 1, 1, Polarity::kOff},
      {2, 2, 0, Polarity::kOff}, {3, 2, 0, Polarity::kOn},
      {4, 3, 2, Polarity::kOff}};
  const auto frame = Accumulate(events, {0, 10, 0}, g, config);
  ASSERT_TRUE(frame.has_value());
  EXPECT_EQ(frame->at(1, 1), kOffIntensity);
  EXPECT_EQ(frame->at(0, 2), kOnIntensity);
  EXPECT_EQ(frame->at(2, 3), kOffIntensity);
  EXPECT_EQ(frame->at(0, 0), 128);
  EXPECT_EQ(std::count(frame->pixels.begin(), frame->pixels.end(), 128), 9);
}

TEST(GenerateFrames, OneSecondStreamYieldsHundredFrames) {
  // 300 events per millisecond spread evenly over one second.
  std::vector<Event> events;
  for (std::uint64_t i = 0; i < 300'000; ++i) {
    events.push_back({i * 1'000'000 / 300'000, static_cast<std::uint16_t>(i % 346),
                      0, Polarity::kOn});
  }
  const auto frames = GenerateFrames(EventStream(kDavis, std::move(events)),
                                     FrameGenConfig{});
  ASSERT_EQ(frames.size(), 100u);
  for (const Frame& f : frames) EXPECT_GE(f.event_count, 2999u);
}

TEST(GenerateFrames, EventAtFinalBoundaryIsKept) {
  FrameGenConfig config;
  config.event_threshold = 0;
  const std::vector<Event> events = {{0, 0, 0, Polarity::kOn},
                                     {20'000, 5, 5, Polarity::kOff}};
  const auto frames = GenerateFrames(EventStream(kDavis, events), config);
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[1].event_count, 1u);
  EXPECT_EQ(frames[1].at(5, 5), kOffIntensity);
}

TEST(GenerateFrames, ZeroFramesWhenGateNeverOpens) {
  FrameGenConfig config;
  config.event_threshold = 1'000'000'000;
  EXPECT_TRUE(GenerateFrames(EventStream(kDavis, Repeat(5000, 0, 3)), config).empty());
}

EventStream RandomStream(std::mt19937_64& rng, const SensorGeometry& g) {
  const std::size_t n = 1 + rng() % 5000;
  const std::uint64_t span = 1 + rng() % 80'000;
  const std::uint64_t t0 = rng() % 1000;
  std::vector<Event> events;
  for (std::size_t i = 0; i < n; ++i) {
    events.push_back({t0 + rng() % span, static_cast<std::uint16_t>(rng() % g.width),
                      static_cast<std::uint16_t>(rng() % g.height),
                      rng() % 2 ? Polarity::kOn : Polarity::kOff});
  }
  return EventStream(g, std::move(events));
}

TEST(FrameGenProperty, WindowsTileAndConserveEvents) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const EventStream s = RandomStream(rng, {32, 24});
    const std::uint64_t d = 1 + rng() % 20'000;
    const auto slices = SliceWindows(s, d);
    const auto plan = PlanWindows(s.t_min(), s.t_max(), d);
    ASSERT_EQ(slices.size(), plan.size());
    std::size_t total = 0;
    for (std::size_t i = 0; i < slices.size(); ++i) {
      EXPECT_EQ(slices[i].window, plan[i]);
      total += slices[i].events.size();
    }
    EXPECT_EQ(total, s.size());
    EXPECT_EQ(plan.front().t_start, s.t_min());
    EXPECT_GE(plan.back().t_end, s.t_max());
    EXPECT_LE(plan.back().t_start, s.t_max());
  }
}

TEST(FrameGenProperty, PixelAlphabetAndMonotoneGate) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const EventStream s = RandomStream(rng, {40, 30});
    FrameGenConfig config;
    config.duration_ms = 5.0;
    config.event_threshold = rng() % 500;
    const auto frames = GenerateFrames(s, config);
    for (const Frame& f : frames) {
      for (std::uint8_t v : f.pixels) {
        EXPECT_TRUE(v == 0 || v == 128 || v == 255);
      }
    }
    FrameGenConfig stricter = config;
    stricter.event_threshold += 1 + rng() % 200;
    EXPECT_LE(GenerateFrames(s, stricter).size(), frames.size());
  }
}

TEST(FrameGenProperty, MatchesBruteForceRasterizer) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    const EventStream s = RandomStream(rng, {20, 16});
    FrameGenConfig config;
    config.duration_ms = static_cast<double>(1 + rng() % 30'000) / 1000.0;
    config.event_threshold = rng() % 50;
    config.background_intensity = static_cast<std::uint8_t>(1 + rng() % 254);
    EXPECT_EQ(GenerateFrames(s, config), testing::BruteForceFrames(s, config))
        << "trial " << trial;
  }
}

TEST(FrameGenProperty, ThreadCountDoesNotChangeOutput) {
  std::mt19937_64 rng(14);
  const EventStream s = RandomStream(rng, {64, 48});
  FrameGenConfig config;
  config.duration_ms = 1.0;
  config.event_threshold = 10;
  const auto serial = GenerateFrames(s, config, 1);
  EXPECT_EQ(GenerateFrames(s, config, 4), serial);
  EXPECT_EQ(GenerateFrames(s, config, 0), serial);
}

TEST(FrameSidecar, RoundTrips) {
  FrameGenConfig config;
  config.event_threshold = 0;
  const auto frames = GenerateFrames(EventStream(kDavis, Repeat(30, 0, 1000)), config);
  std::stringstream io;
  WriteFrameSidecar(io, frames);
  const auto rows = ReadFrameSidecar(io);
  ASSERT_EQ(rows.size(), frames.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i], (SidecarRow{frames[i].window.index, frames[i].window.t_start,
                                   frames[i].window.t_end, frames[i].event_count}));
  }
  EXPECT_EQ(FrameFileName(12), "frame_000012.png");
}

}  // namespace
}  // namespace evpupil
