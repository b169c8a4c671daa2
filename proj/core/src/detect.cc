// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#include "evpupil/detect.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "csv_util.h"
#include "evpupil/error.h"

namespace evpupil {

namespace {

struct Moments {
  std::int64_t n = 0;
  std::int64_t sx = 0;
  std::int64_t sy = 0;
  std::int64_t sxx = 0;
  std::int64_t syy = 0;

  void Add(std::int64_t x, std::int64_t y) {
    ++n;
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
  }
  // Population variance from exact integer sums.
  static double Variance(std::int64_t n, std::int64_t s, std::int64_t ss) {
    const std::int64_t num = n * ss - s * s;
    return static_cast<double>(num) / (static_cast<double>(n) * n);
  }
};

}  // namespace

std::optional<Detection> CentroidDetect(std::span<const std::uint8_t> pixels,
                                        const SensorGeometry& geometry,
                                        const CentroidConfig& config,
                                        std::string frame_ref) {
  if (pixels.size() != geometry.PixelCount()) {
    throw Error(ErrorCode::kInvalidArgument,
                "pixel buffer does not match geometry");
  }
  Moments on;
  Moments off;
  for (std::uint32_t row = 0; row < geometry.height; ++row) {
    const std::uint8_t* line = pixels.data() + static_cast<std::size_t>(row) * geometry.width;
    for (std::uint32_t col = 0; col < geometry.width; ++col) {
      const std::uint8_t v = line[col];
      if (v == config.background_intensity) continue;
      if (v == kOnIntensity) {
        on.Add(col, row);
      } else if (v == kOffIntensity) {
        off.Add(col, row);
      }
    }
  }
  const auto total = static_cast<std::uint64_t>(on.n + off.n);
  if (total == 0 || total < config.min_events) return std::nullopt;

  const Moments& m = on.n >= off.n ? on : off;
  const double n = static_cast<double>(m.n);
  const double mx = static_cast<double>(m.sx) / n;
  const double my = static_cast<double>(m.sy) / n;
  const double hx =
      std::max(config.box_sigma * std::sqrt(Moments::Variance(m.n, m.sx, m.sxx)), 0.5);
  const double hy =
      std::max(config.box_sigma * std::sqrt(Moments::Variance(m.n, m.sy, m.syy)), 0.5);

  Detection d;
  d.frame_ref = std::move(frame_ref);
  d.class_id = 0;
  d.box = Box{std::max(0.0, mx - hx), std::max(0.0, my - hy),
              std::min<double>(geometry.width, mx + hx),
              std::min<double>(geometry.height, my + hy)};
  d.confidence = n / static_cast<double>(total);
  return d;
}

std::optional<Detection> CentroidDetect(const Frame& frame,
                                        const CentroidConfig& config) {
  return CentroidDetect(frame.pixels, frame.geometry, config,
                        FrameFileName(frame.window.index));
}

void ValidateDetection(const Detection& d,
                       const std::optional<SensorGeometry>& bounds) {
  const Box& b = d.box;
  if (!std::isfinite(b.x_min) || !std::isfinite(b.y_min) ||
      !std::isfinite(b.x_max) || !std::isfinite(b.y_max) || b.degenerate()) {
    throw Error(ErrorCode::kSchema, "degenerate box for frame " + d.frame_ref);
  }
  if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
    throw Error(ErrorCode::kSchema,
                "confidence " + internal::FormatDouble(d.confidence) +
                    " outside [0,1] for frame " + d.frame_ref);
  }
  if (d.class_id < 0) {
    throw Error(ErrorCode::kSchema, "negative class for frame " + d.frame_ref);
  }
  if (bounds && (b.x_min < 0.0 || b.y_min < 0.0 || b.x_max > bounds->width ||
                 b.y_max > bounds->height)) {
    throw Error(ErrorCode::kSchema,
                "box outside the sensor for frame " + d.frame_ref);
  }
}

std::vector<Detection> LoadDetections(
    std::istream& in, const std::optional<SensorGeometry>& bounds) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("detections JSON: ") + e.what());
  }
  if (!doc.is_array()) {
    throw Error(ErrorCode::kSchema, "detections JSON must be an array");
  }
  std::vector<Detection> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& rec = doc[i];
    const std::string where = "detection " + std::to_string(i);
    if (!rec.is_object()) throw Error(ErrorCode::kSchema, where + ": not an object");
    if (!rec.contains("frame") || !rec["frame"].is_string()) {
      throw Error(ErrorCode::kSchema, where + ": missing string 'frame'");
    }
    if (!rec.contains("box") || !rec["box"].is_array() || rec["box"].size() != 4) {
      throw Error(ErrorCode::kSchema, where + ": 'box' must be [x0,y0,x1,y1]");
    }
    for (const auto& v : rec["box"]) {
      if (!v.is_number()) throw Error(ErrorCode::kSchema, where + ": non-numeric box");
    }
    if (!rec.contains("conf") || !rec["conf"].is_number()) {
      throw Error(ErrorCode::kSchema, where + ": missing numeric 'conf'");
    }
    Detection d;
    d.frame_ref = rec["frame"].get<std::string>();
    if (rec.contains("class")) {
      if (!rec["class"].is_number_integer()) {
        throw Error(ErrorCode::kSchema, where + ": 'class' must be an integer");
      }
      d.class_id = rec["class"].get<int>();
    }
    d.box = Box{rec["box"][0].get<double>(), rec["box"][1].get<double>(),
                rec["box"][2].get<double>(), rec["box"][3].get<double>()};
    d.confidence = rec["conf"].get<double>();
    try {
      ValidateDetection(d, bounds);
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.what());
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<Detection> LoadDetectionsFile(
    const std::filesystem::path& path,
    const std::optional<SensorGeometry>& bounds) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return LoadDetections(in, bounds);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void WriteDetections(std::ostream& out, std::span<const Detection> detections) {
  nlohmann::json doc = nlohmann::json::array();
  for (const Detection& d : detections) {
    ValidateDetection(d);
    doc.push_back({{"frame", d.frame_ref},
                   {"class", d.class_id},
                   {"box", {d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max}},
                   {"conf", d.confidence}});
  }
  out << doc.dump(1) << '\n';
}

void WriteDetectionsFile(const std::filesystem::path& path,
                         std::span<const Detection> detections) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  WriteDetections(out, detections);
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

std::map<std::string, std::vector<Detection>> GroupByFrame(
    std::span<const Detection> detections) {
  std::map<std::string, std::vector<Detection>> out;
  for (const Detection& d : detections) out[d.frame_ref].push_back(d);
  return out;
}

}  // namespace evpupil
