// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#include "evpupil/dataset.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "csv_util.h"
#include "evpupil/error.h"
#include "evpupil/parallel.h"
#include "evpupil/png_io.h"
#include "rng.h"

namespace evpupil {

const char* EyeName(Eye eye) { return eye == Eye::kLeft ? "left" : "right"; }

Eye ParseEye(std::string_view name) {
  if (name == "left" || name == "l" || name == "L") return Eye::kLeft;
  if (name == "right" || name == "r" || name == "R") return Eye::kRight;
  throw Error(ErrorCode::kInvalidArgument,
              "eye must be left or right, got '" + std::string(name) + "'");
}

const char* PartitionName(Partition partition) {
  switch (partition) {
    case Partition::kTrain: return "train";
    case Partition::kVal: return "val";
    case Partition::kTest: return "test";
  }
  return "?";
}

void Annotation::Validate() const {
  constexpr double kTol = 1e-6;
  const bool ok = class_id >= 0 && cx >= 0.0 && cx <= 1.0 && cy >= 0.0 &&
                  cy <= 1.0 && w > 0.0 && w <= 1.0 && h > 0.0 && h <= 1.0 &&
                  cx - 0.5 * w >= -kTol && cx + 0.5 * w <= 1.0 + kTol &&
                  cy - 0.5 * h >= -kTol && cy + 0.5 * h <= 1.0 + kTol;
  if (!ok) {
    throw Error(ErrorCode::kOutOfRange,
                "annotation outside the unit square: " +
                    internal::FormatDouble(cx) + " " +
                    internal::FormatDouble(cy) + " " +
                    internal::FormatDouble(w) + " " +
                    internal::FormatDouble(h));
  }
}

Annotation AnnotationFromPixelBox(const Box& box, const SensorGeometry& geometry,
                                  int class_id) {
  const double w = geometry.width;
  const double h = geometry.height;
  Annotation a;
  a.class_id = class_id;
  a.cx = box.center_x() / w;
  a.cy = box.center_y() / h;
  a.w = box.width() / w;
  a.h = box.height() / h;
  return a;
}

Box PixelBoxFromAnnotation(const Annotation& a, const SensorGeometry& geometry) {
  const double w = geometry.width;
  const double h = geometry.height;
  return Box{(a.cx - 0.5 * a.w) * w, (a.cy - 0.5 * a.h) * h,
             (a.cx + 0.5 * a.w) * w, (a.cy + 0.5 * a.h) * h};
}

std::string WriteYoloLabel(std::span<const Annotation> annotations) {
  std::string out;
  char buf[128];
  for (const Annotation& a : annotations) {
    a.Validate();
    std::snprintf(buf, sizeof(buf), "%d %.6f %.6f %.6f %.6f\n", a.class_id,
                  a.cx, a.cy, a.w, a.h);
    out += buf;
  }
  return out;
}

std::vector<Annotation> ReadYoloLabel(std::string_view text,
                                      std::string_view frame_ref) {
  std::vector<Annotation> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    const std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const std::string_view line = internal::Trim(internal::StripLineEnding(raw));
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    for (const auto f : internal::SplitFields(line, ' ')) {
      if (!f.empty()) fields.push_back(f);
    }
    if (fields.size() != 5) {
      throw Error(ErrorCode::kParse, "label line " + std::to_string(line_no) +
                                         ": expected 'class cx cy w h'");
    }
    const auto cls = internal::ParseInt(fields[0]);
    const auto cx = internal::ParseDouble(fields[1]);
    const auto cy = internal::ParseDouble(fields[2]);
    const auto w = internal::ParseDouble(fields[3]);
    const auto h = internal::ParseDouble(fields[4]);
    if (!cls || *cls < 0 || !cx || !cy || !w || !h) {
      throw Error(ErrorCode::kParse, "label line " + std::to_string(line_no) +
                                         ": non-numeric or negative class");
    }
    Annotation a{static_cast<int>(*cls), *cx, *cy, *w, *h,
                 std::string(frame_ref)};
    try {
      a.Validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::kOutOfRange,
                  "label line " + std::to_string(line_no) + ": " + e.what());
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<Annotation> ReadYoloLabelFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return ReadYoloLabel(buffer.str(), path.stem().string());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

namespace {

struct Candidate {
  std::size_t recording = 0;
  std::size_t slice = 0;
};

}  // namespace

SampleResult SampleFrames(std::span<const Recording> recordings,
                          std::size_t n_per_eye, const FrameGenConfig& config,
                          std::uint64_t seed, unsigned threads) {
  if (n_per_eye == 0) {
    throw Error(ErrorCode::kInvalidArgument, "frames per eye must be >= 1");
  }
  if (recordings.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no recordings to sample");
  }
  config.Validate();

  std::vector<std::vector<WindowSlice>> slices(recordings.size());
  for (std::size_t r = 0; r < recordings.size(); ++r) {
    slices[r] = SliceWindows(recordings[r].stream, config.DurationUs());
  }

  std::map<std::pair<std::string, Eye>, std::vector<Candidate>> groups;
  for (std::size_t r = 0; r < recordings.size(); ++r) {
    auto& pool = groups[{recordings[r].subject_id, recordings[r].eye}];
    for (std::size_t s = 0; s < slices[r].size(); ++s) {
      if (slices[r][s].events.size() > config.event_threshold) {
        pool.push_back({r, s});
      }
    }
  }

  SampleResult result;
  std::vector<Candidate> chosen;
  for (auto& [key, pool] : groups) {
    const auto& [subject, eye] = key;
    const std::string label = subject + "/" + EyeName(eye);
    if (pool.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "subject " + label + " emitted no frames");
    }
    if (pool.size() < n_per_eye) {
      result.warnings.push_back("subject " + label + " has only " +
                                std::to_string(pool.size()) +
                                " frames; wanted " + std::to_string(n_per_eye));
    }
    const std::size_t take = std::min(n_per_eye, pool.size());
    std::mt19937_64 rng(internal::DeriveSeed(seed, label));
    internal::PartialShuffle(pool, take, rng);
    std::vector<Candidate> picked(pool.begin(), pool.begin() + take);
    std::sort(picked.begin(), picked.end(), [](const Candidate& a, const Candidate& b) {
      return std::tie(a.recording, a.slice) < std::tie(b.recording, b.slice);
    });
    chosen.insert(chosen.end(), picked.begin(), picked.end());
  }

  result.frames.resize(chosen.size());
  ParallelFor(chosen.size(), threads, [&](std::size_t i) {
    const Candidate& c = chosen[i];
    const Recording& rec = recordings[c.recording];
    const WindowSlice& slice = slices[c.recording][c.slice];
    auto frame = Accumulate(slice.events, slice.window, rec.stream.geometry(),
                            config);
    result.frames[i] = SampledFrame{rec.subject_id, rec.eye, c.recording,
                                    std::move(*frame)};
  });
  return result;
}

std::optional<Partition> SubjectSplit::Find(std::string_view subject_id) const {
  const auto has = [&](const std::vector<std::string>& v) {
    return std::find(v.begin(), v.end(), subject_id) != v.end();
  };
  if (has(train)) return Partition::kTrain;
  if (has(val)) return Partition::kVal;
  if (has(test)) return Partition::kTest;
  return std::nullopt;
}

SubjectSplit SplitBySubject(std::span<const std::string> subject_ids,
                            const SplitRatios& ratios, std::uint64_t seed) {
  const double parts[3] = {ratios.train, ratios.val, ratios.test};
  double sum = 0.0;
  for (const double r : parts) {
    if (!(r >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "split ratios must be >= 0");
    }
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "split ratios must sum to 1, got " + internal::FormatDouble(sum));
  }

  std::vector<std::string> subjects(subject_ids.begin(), subject_ids.end());
  std::sort(subjects.begin(), subjects.end());
  subjects.erase(std::unique(subjects.begin(), subjects.end()), subjects.end());
  const std::size_t n = subjects.size();
  const auto nonzero = static_cast<std::size_t>(
      std::count_if(std::begin(parts), std::end(parts),
                    [](double r) { return r > 0.0; }));
  if (n < nonzero) {
    throw Error(ErrorCode::kInvalidArgument,
                std::to_string(n) + " subjects cannot fill " +
                    std::to_string(nonzero) + " partitions");
  }

  // Largest remainder rounding of the quotas.
  std::size_t counts[3];
  double remainders[3];
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double quota = parts[i] * static_cast<double>(n);
    counts[i] = static_cast<std::size_t>(std::floor(quota + 1e-9));
    remainders[i] = quota - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  while (assigned < n) {
    int best = -1;
    for (int i = 0; i < 3; ++i) {
      if (parts[i] <= 0.0) continue;
      if (best < 0 || remainders[i] > remainders[best]) best = i;
    }
    ++counts[best];
    remainders[best] = -1.0;
    ++assigned;
  }
  // No nonzero partition may end up empty.
  for (int i = 0; i < 3; ++i) {
    if (parts[i] <= 0.0 || counts[i] > 0) continue;
    int donor = -1;
    for (int j = 0; j < 3; ++j) {
      if (counts[j] > 1 && (donor < 0 || counts[j] > counts[donor])) donor = j;
    }
    --counts[donor];
    ++counts[i];
  }

  std::mt19937_64 rng(internal::DeriveSeed(seed, "split"));
  internal::PartialShuffle(subjects, n, rng);
  SubjectSplit split;
  std::vector<std::string>* targets[3] = {&split.train, &split.val, &split.test};
  std::size_t next = 0;
  for (int i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < counts[i]; ++k) {
      targets[i]->push_back(subjects[next++]);
    }
    std::sort(targets[i]->begin(), targets[i]->end());
  }
  return split;
}

std::vector<ManifestEntry>& SplitManifest::at(Partition partition) {
  switch (partition) {
    case Partition::kTrain: return train;
    case Partition::kVal: return val;
    case Partition::kTest: return test;
  }
  return train;
}

const std::vector<ManifestEntry>& SplitManifest::at(Partition partition) const {
  return const_cast<SplitManifest*>(this)->at(partition);
}

std::string DatasetImageStem(const SampledFrame& frame) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "_r%zu_frame_%06zu", frame.recording,
                frame.frame.window.index);
  return frame.subject_id + "_" + EyeName(frame.eye) + buf;
}

namespace {

nlohmann::json EntryToJson(const ManifestEntry& e) {
  return {{"subject", e.subject_id},
          {"eye", EyeName(e.eye)},
          {"source", e.source},
          {"window_index", e.window_index},
          {"t_start_us", e.t_start_us},
          {"t_end_us", e.t_end_us},
          {"event_count", e.event_count},
          {"image", e.image},
          {"label", e.label},
          {"boxes", e.boxes}};
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace

SplitManifest EmitDataset(const std::filesystem::path& root,
                          std::span<const Recording> recordings,
                          std::span<const SampledFrame> frames,
                          const SubjectSplit& split, unsigned threads) {
  namespace fs = std::filesystem;
  for (const Partition p : {Partition::kTrain, Partition::kVal, Partition::kTest}) {
    fs::create_directories(root / "images" / PartitionName(p));
    fs::create_directories(root / "labels" / PartitionName(p));
  }

  std::vector<Partition> partitions(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto p = split.Find(frames[i].subject_id);
    if (!p) {
      throw Error(ErrorCode::kNotFound,
                  "subject " + frames[i].subject_id + " is not in the split");
    }
    if (frames[i].recording >= recordings.size()) {
      throw Error(ErrorCode::kNotFound, "sampled frame references unknown recording");
    }
    partitions[i] = *p;
  }

  std::vector<ManifestEntry> entries(frames.size());
  ParallelFor(frames.size(), threads, [&](std::size_t i) {
    const SampledFrame& sf = frames[i];
    const Recording& rec = recordings[sf.recording];
    const std::string part = PartitionName(partitions[i]);
    const std::string stem = DatasetImageStem(sf);

    std::vector<Annotation> boxes;
    if (rec.truth) {
      const double t_ms = sf.frame.window.MidpointUs() / 1000.0;
      const Point2 c = rec.truth->CenterAt(t_ms);
      const double r = rec.truth->radius();
      const SensorGeometry& g = sf.frame.geometry;
      Box box{std::max(0.0, c.x - r), std::max(0.0, c.y - r),
              std::min<double>(g.width, c.x + r),
              std::min<double>(g.height, c.y + r)};
      if (!box.degenerate()) {
        Annotation a = AnnotationFromPixelBox(box, g);
        a.frame_ref = stem;
        boxes.push_back(a);
      }
    }

    ManifestEntry e;
    e.subject_id = sf.subject_id;
    e.eye = sf.eye;
    e.source = rec.source;
    e.window_index = sf.frame.window.index;
    e.t_start_us = sf.frame.window.t_start;
    e.t_end_us = sf.frame.window.t_end;
    e.event_count = sf.frame.event_count;
    e.image = "images/" + part + "/" + stem + ".png";
    e.label = "labels/" + part + "/" + stem + ".txt";
    e.boxes = boxes.size();
    WriteFramePng(root / e.image, sf.frame);
    WriteTextFile(root / e.label, WriteYoloLabel(boxes));
    entries[i] = std::move(e);
  });

  SplitManifest manifest;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    manifest.at(partitions[i]).push_back(std::move(entries[i]));
  }

  nlohmann::json doc;
  doc["subjects"] = {{"train", split.train}, {"val", split.val}, {"test", split.test}};
  for (const Partition p : {Partition::kTrain, Partition::kVal, Partition::kTest}) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& e : manifest.at(p)) list.push_back(EntryToJson(e));
    doc["images"][PartitionName(p)] = std::move(list);
  }
  WriteTextFile(root / "manifest.json", doc.dump(2) + "\n");
  return manifest;
}

}  // namespace evpupil
