// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#include "evpupil/config.h"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "evpupil/error.h"

namespace evpupil {

using nlohmann::json;

void PipelineConfig::Validate() const {
  geometry.Validate();
  framegen.Validate();
  if (dataset.frames_per_eye == 0) {
    throw Error(ErrorCode::kInvalidArgument, "dataset.frames_per_eye must be >= 1");
  }
  const SplitRatios& r = dataset.ratios;
  if (!(r.train >= 0 && r.val >= 0 && r.test >= 0) ||
      std::abs(r.train + r.val + r.test - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "dataset.ratios must be nonnegative and sum to 1");
  }
  if (!(centroid.box_sigma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "centroid.box_sigma must be > 0");
  }
  if (centroid.background_intensity != framegen.background_intensity) {
    throw Error(ErrorCode::kInvalidArgument,
                "centroid.background_intensity must equal "
                "framegen.background_intensity");
  }
  if (!(match.iou_threshold > 0.0 && match.iou_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "match.iou_threshold must be in (0,1]");
  }
  if (!(match.confidence_threshold >= 0.0 && match.confidence_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "match.confidence_threshold must be in [0,1]");
  }
  if (track.px_per_degree && !(*track.px_per_degree > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "track.px_per_degree must be > 0");
  }
  if (!(track.min_saccade_ms >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "track.min_saccade_ms must be >= 0");
  }
}

std::string PipelineConfigToJson(const PipelineConfig& c) {
  json doc = {
      {"geometry", {{"width", c.geometry.width}, {"height", c.geometry.height}}},
      {"framegen",
       {{"duration_ms", c.framegen.duration_ms},
        {"event_threshold", c.framegen.event_threshold},
        {"background_intensity", c.framegen.background_intensity},
        {"collision_rule", "last_write_wins"}}},
      {"dataset",
       {{"frames_per_eye", c.dataset.frames_per_eye},
        {"ratios",
         {{"train", c.dataset.ratios.train},
          {"val", c.dataset.ratios.val},
          {"test", c.dataset.ratios.test}}}}},
      {"centroid",
       {{"min_events", c.centroid.min_events},
        {"box_sigma", c.centroid.box_sigma},
        {"background_intensity", c.centroid.background_intensity}}},
      {"match",
       {{"iou_threshold", c.match.iou_threshold},
        {"confidence_threshold", c.match.confidence_threshold}}},
      {"track",
       {{"max_gap_frames", c.track.max_gap_frames},
        {"px_per_degree",
         c.track.px_per_degree ? json(*c.track.px_per_degree) : json(nullptr)},
        {"saccade_threshold_deg_s", c.track.saccade_threshold_deg_s},
        {"min_saccade_ms", c.track.min_saccade_ms}}},
      {"seed", c.seed},
      {"threads", c.threads}};
  return doc.dump(2) + "\n";
}

namespace {

void CheckKeys(const json& obj, const std::string& where,
               std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) {
    throw Error(ErrorCode::kSchema, "config: '" + where + "' must be an object");
  }
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) {
      throw Error(ErrorCode::kSchema,
                  "config: unknown key '" + where + "." + key + "'");
    }
  }
}

template <typename T>
void Read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema,
                std::string("config: bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

PipelineConfig PipelineConfigFromJson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  PipelineConfig c;
  CheckKeys(doc, "", {"geometry", "framegen", "dataset", "centroid", "match",
                      "track", "seed", "threads"});
  if (doc.contains("geometry")) {
    const json& g = doc["geometry"];
    CheckKeys(g, "geometry", {"width", "height"});
    Read(g, "width", c.geometry.width);
    Read(g, "height", c.geometry.height);
  }
  if (doc.contains("framegen")) {
    const json& f = doc["framegen"];
    CheckKeys(f, "framegen", {"duration_ms", "event_threshold",
                              "background_intensity", "collision_rule"});
    Read(f, "duration_ms", c.framegen.duration_ms);
    Read(f, "event_threshold", c.framegen.event_threshold);
    Read(f, "background_intensity", c.framegen.background_intensity);
    std::string rule = "last_write_wins";
    Read(f, "collision_rule", rule);
    if (rule != "last_write_wins") {
      throw Error(ErrorCode::kSchema, "config: unsupported collision_rule " + rule);
    }
    c.centroid.background_intensity = c.framegen.background_intensity;
  }
  if (doc.contains("dataset")) {
    const json& d = doc["dataset"];
    CheckKeys(d, "dataset", {"frames_per_eye", "ratios"});
    Read(d, "frames_per_eye", c.dataset.frames_per_eye);
    if (d.contains("ratios")) {
      const json& r = d["ratios"];
      CheckKeys(r, "dataset.ratios", {"train", "val", "test"});
      Read(r, "train", c.dataset.ratios.train);
      Read(r, "val", c.dataset.ratios.val);
      Read(r, "test", c.dataset.ratios.test);
    }
  }
  if (doc.contains("centroid")) {
    const json& d = doc["centroid"];
    CheckKeys(d, "centroid", {"min_events", "box_sigma", "background_intensity"});
    Read(d, "min_events", c.centroid.min_events);
    Read(d, "box_sigma", c.centroid.box_sigma);
    Read(d, "background_intensity", c.centroid.background_intensity);
  }
  if (doc.contains("match")) {
    const json& m = doc["match"];
    CheckKeys(m, "match", {"iou_threshold", "confidence_threshold"});
    Read(m, "iou_threshold", c.match.iou_threshold);
    Read(m, "confidence_threshold", c.match.confidence_threshold);
  }
  if (doc.contains("track")) {
    const json& t = doc["track"];
    CheckKeys(t, "track", {"max_gap_frames", "px_per_degree",
                           "saccade_threshold_deg_s", "min_saccade_ms"});
    Read(t, "max_gap_frames", c.track.max_gap_frames);
    if (t.contains("px_per_degree") && !t["px_per_degree"].is_null()) {
      double v = 0.0;
      Read(t, "px_per_degree", v);
      c.track.px_per_degree = v;
    }
    Read(t, "saccade_threshold_deg_s", c.track.saccade_threshold_deg_s);
    Read(t, "min_saccade_ms", c.track.min_saccade_ms);
  }
  Read(doc, "seed", c.seed);
  Read(doc, "threads", c.threads);
  c.Validate();
  return c;
}

PipelineConfig LoadPipelineConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return PipelineConfigFromJson(buffer.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace evpupil
