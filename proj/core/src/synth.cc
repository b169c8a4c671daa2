// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#include "evpupil/synth.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>

#include "csv_util.h"
#include "evpupil/error.h"

namespace evpupil {

PathFn StationaryPath(Point2 center) {
  return [center](double) { return center; };
}

PathFn LinearPath(Point2 from, Point2 to, double duration_ms) {
  if (!(duration_ms > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "linear path needs duration > 0");
  }
  return [=](double t_ms) {
    const double s = std::clamp(t_ms / duration_ms, 0.0, 1.0);
    return Point2{from.x + s * (to.x - from.x), from.y + s * (to.y - from.y)};
  };
}

PathFn SinusoidPath(Point2 center, double amplitude_px, double period_ms) {
  if (!(period_ms > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sinusoid path needs period > 0");
  }
  return [=](double t_ms) {
    const double phase = 2.0 * std::numbers::pi * t_ms / period_ms;
    return Point2{center.x + amplitude_px * std::sin(phase), center.y};
  };
}

PathFn StepPath(Point2 from, Point2 to, double onset_ms, double step_ms) {
  if (!(step_ms > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "step path needs step_ms > 0");
  }
  return [=](double t_ms) {
    const double tau = std::clamp((t_ms - onset_ms) / step_ms, 0.0, 1.0);
    // Minimum-jerk profile: zero velocity and acceleration at both ends.
    const double s = tau * tau * tau * (10.0 - 15.0 * tau + 6.0 * tau * tau);
    return Point2{from.x + s * (to.x - from.x), from.y + s * (to.y - from.y)};
  };
}

GroundTruthTrack::GroundTruthTrack(double radius_px,
                                   std::vector<GroundTruthSample> samples)
    : radius_(radius_px), samples_(std::move(samples)) {
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (!(samples_[i].t_ms > samples_[i - 1].t_ms)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "ground truth samples must be strictly increasing in time");
    }
  }
}

Point2 GroundTruthTrack::CenterAt(double t_ms) const {
  if (samples_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty ground truth track");
  }
  if (t_ms <= samples_.front().t_ms) return samples_.front().center;
  if (t_ms >= samples_.back().t_ms) return samples_.back().center;
  const auto hi = std::upper_bound(
      samples_.begin(), samples_.end(), t_ms,
      [](double t, const GroundTruthSample& s) { return t < s.t_ms; });
  const auto lo = hi - 1;
  const double s = (t_ms - lo->t_ms) / (hi->t_ms - lo->t_ms);
  return Point2{lo->center.x + s * (hi->center.x - lo->center.x),
                lo->center.y + s * (hi->center.y - lo->center.y)};
}

void WriteGroundTruthCsv(std::ostream& out, const GroundTruthTrack& track) {
  out << "t_ms,cx,cy,radius\n";
  for (const auto& s : track.samples()) {
    out << internal::FormatDouble(s.t_ms) << ','
        << internal::FormatDouble(s.center.x) << ','
        << internal::FormatDouble(s.center.y) << ','
        << internal::FormatDouble(track.radius()) << '\n';
  }
}

GroundTruthTrack ReadGroundTruthCsv(std::istream& in) {
  std::vector<GroundTruthSample> samples;
  std::optional<double> radius;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = internal::Trim(internal::StripLineEnding(line));
    if (body.empty()) continue;
    const auto fields = internal::SplitFields(body);
    if (line_no == 1 && !fields.empty() && fields[0] == "t_ms") continue;
    if (fields.size() != 4) {
      throw Error(ErrorCode::kParse, "ground truth line " +
                                         std::to_string(line_no) +
                                         ": expected t_ms,cx,cy,radius");
    }
    const auto t = internal::ParseDouble(fields[0]);
    const auto cx = internal::ParseDouble(fields[1]);
    const auto cy = internal::ParseDouble(fields[2]);
    const auto r = internal::ParseDouble(fields[3]);
    if (!t || !cx || !cy || !r) {
      throw Error(ErrorCode::kParse, "ground truth line " +
                                         std::to_string(line_no) +
                                         ": non-numeric field");
    }
    radius = *r;
    samples.push_back({*t, {*cx, *cy}});
  }
  if (samples.empty()) {
    throw Error(ErrorCode::kEmptyStream, "empty ground truth track");
  }
  return GroundTruthTrack(*radius, std::move(samples));
}

GroundTruthTrack ReadGroundTruthFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return ReadGroundTruthCsv(in);
}

namespace {

// Uniform double in [0, 1) from the top 53 bits; identical on every platform
// unlike std::uniform_real_distribution.
double Uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void CheckInside(const SensorGeometry& g, Point2 c, double r, double t_ms) {
  const double max_x = static_cast<double>(g.width - 1);
  const double max_y = static_cast<double>(g.height - 1);
  if (c.x - r < 0.0 || c.y - r < 0.0 || c.x + r > max_x || c.y + r > max_y) {
    throw Error(ErrorCode::kOutOfRange,
                "disc leaves the sensor at t=" + internal::FormatDouble(t_ms) +
                    " ms (center " + internal::FormatDouble(c.x) + "," +
                    internal::FormatDouble(c.y) + ")");
  }
}

}  // namespace

SynthResult SynthMovingDisc(const SensorGeometry& geometry, const PathFn& path,
                            const DiscSynthConfig& config) {
  geometry.Validate();
  if (!(config.radius_px > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "radius must be > 0");
  }
  if (!(config.event_rate_per_ms > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "event rate must be > 0");
  }
  if (!(config.duration_ms > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "duration must be > 0");
  }
  if (!(config.flicker_speed_px_per_ms >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "flicker speed must be >= 0");
  }
  const double r = config.radius_px;

  std::vector<GroundTruthSample> truth;
  const auto whole_ms = static_cast<std::size_t>(std::floor(config.duration_ms));
  for (std::size_t k = 0; k <= whole_ms; ++k) {
    const double t = static_cast<double>(k);
    const Point2 c = path(t);
    CheckInside(geometry, c, r, t);
    truth.push_back({t, c});
  }
  if (static_cast<double>(whole_ms) < config.duration_ms) {
    const Point2 c = path(config.duration_ms);
    CheckInside(geometry, c, r, config.duration_ms);
    truth.push_back({config.duration_ms, c});
  }

  std::mt19937_64 rng(config.seed);
  std::vector<Event> events;
  events.reserve(static_cast<std::size_t>(
      std::llround(config.event_rate_per_ms * config.duration_ms)));
  const std::size_t buckets =
      static_cast<std::size_t>(std::ceil(config.duration_ms));
  constexpr double kDerivStepMs = 0.01;
  std::vector<Event> bucket;
  for (std::size_t k = 0; k < buckets; ++k) {
    const double lo_ms = static_cast<double>(k);
    const double hi_ms = std::min(lo_ms + 1.0, config.duration_ms);
    const auto n = static_cast<std::size_t>(
        std::llround(config.event_rate_per_ms * hi_ms) -
        std::llround(config.event_rate_per_ms * lo_ms));
    bucket.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const double t_ms = lo_ms + (hi_ms - lo_ms) * Uniform01(rng);
      const double theta = 2.0 * std::numbers::pi * Uniform01(rng);
      const Point2 c = path(t_ms);
      const Point2 ahead = path(t_ms + kDerivStepMs);
      const Point2 behind = path(t_ms - kDerivStepMs);
      const double vx = (ahead.x - behind.x) / (2.0 * kDerivStepMs);
      const double vy = (ahead.y - behind.y) / (2.0 * kDerivStepMs);
      const double nx = std::cos(theta);
      const double ny = std::sin(theta);
      const double v_normal = nx * vx + ny * vy;

      const double motion_weight =
          std::abs(v_normal) /
          (std::abs(v_normal) + config.flicker_speed_px_per_ms);
      const double u = Uniform01(rng);
      Polarity p;
      if (std::isfinite(motion_weight) && u < motion_weight) {
        p = v_normal > 0.0 ? Polarity::kOn : Polarity::kOff;
      } else {
        p = Uniform01(rng) < 0.5 ? Polarity::kOn : Polarity::kOff;
      }

      const long px = std::lround(c.x + r * nx);
      const long py = std::lround(c.y + r * ny);
      if (px < 0 || py < 0 || px >= static_cast<long>(geometry.width) ||
          py >= static_cast<long>(geometry.height)) {
        throw Error(ErrorCode::kOutOfRange, "disc leaves the sensor");
      }
      const auto t_us = static_cast<std::uint64_t>(std::floor(t_ms * 1000.0));
      bucket.push_back(Event{t_us, static_cast<std::uint16_t>(px),
                             static_cast<std::uint16_t>(py), p});
    }
    std::stable_sort(bucket.begin(), bucket.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    events.insert(events.end(), bucket.begin(), bucket.end());
  }
  return SynthResult{EventStream(geometry, std::move(events)),
                     GroundTruthTrack(r, std::move(truth))};
}

}  // namespace evpupil
