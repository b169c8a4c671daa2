// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef EVPUPIL_DATASET_H_
#define EVPUPIL_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evpupil/box.h"
#include "evpupil/event_io.h"
#include "evpupil/framegen.h"
#include "evpupil/synth.h"

namespace evpupil {

enum class Eye { kLeft, kRight };

const char* EyeName(Eye eye);
Eye ParseEye(std::string_view name);

// Normalized YOLO box. class 0 is the pupil.
struct Annotation {
  int class_id = 0;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  std::string frame_ref;

  // Throws kOutOfRange when the box leaves the unit square by more than 1e-6
  // or an extent is not in (0, 1].
  void Validate() const;
};

Annotation AnnotationFromPixelBox(const Box& box, const SensorGeometry& geometry,
                                  int class_id = 0);
Box PixelBoxFromAnnotation(const Annotation& annotation,
                           const SensorGeometry& geometry);

// One "class cx cy w h" line per box with six decimals. No boxes produce an
// empty string.
std::string WriteYoloLabel(std::span<const Annotation> annotations);
// Blank lines are ignored. Throws kParse (with line number) or kOutOfRange.
std::vector<Annotation> ReadYoloLabel(std::string_view text,
                                      std::string_view frame_ref = {});
std::vector<Annotation> ReadYoloLabelFile(const std::filesystem::path& path);

// A single recording session for one eye of one subject.
struct Recording {
  std::string subject_id;
  Eye eye = Eye::kLeft;
  std::string source;  // provenance, usually the events file name
  EventStream stream;
  std::optional<GroundTruthTrack> truth;
};

struct SampledFrame {
  std::string subject_id;
  Eye eye = Eye::kLeft;
  std::size_t recording = 0;  // index into the recordings passed in
  Frame frame;
};

struct SampleResult {
  std::vector<SampledFrame> frames;
  std::vector<std::string> warnings;
};

// Draws up to n_per_eye emitted frames per (subject, eye), pooled over that
// pair's recordings, without replacement. Shortfalls take every frame and add
// a warning. Throws kInvalidArgument when a pair emits no frames at all.
SampleResult SampleFrames(std::span<const Recording> recordings,
                          std::size_t n_per_eye, const FrameGenConfig& config,
                          std::uint64_t seed, unsigned threads = 1);

struct SplitRatios {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;

  friend bool operator==(const SplitRatios&, const SplitRatios&) = default;
};

enum class Partition { kTrain, kVal, kTest };
const char* PartitionName(Partition partition);

struct SubjectSplit {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;

  std::optional<Partition> Find(std::string_view subject_id) const;
  friend bool operator==(const SubjectSplit&, const SubjectSplit&) = default;
};

// Assigns whole subjects to partitions using largest-remainder rounding of
// the ratios. Every partition with a nonzero ratio gets at least one subject.
// Throws kInvalidArgument when ratios do not sum to 1 (within 1e-9) or there
// are fewer distinct subjects than nonzero partitions.
SubjectSplit SplitBySubject(std::span<const std::string> subject_ids,
                            const SplitRatios& ratios, std::uint64_t seed);

struct ManifestEntry {
  std::string subject_id;
  Eye eye = Eye::kLeft;
  std::string source;
  std::size_t window_index = 0;
  std::uint64_t t_start_us = 0;
  std::uint64_t t_end_us = 0;
  std::uint64_t event_count = 0;
  std::string image;  // relative to the dataset root
  std::string label;
  std::size_t boxes = 0;
};

struct SplitManifest {
  std::vector<ManifestEntry> train;
  std::vector<ManifestEntry> val;
  std::vector<ManifestEntry> test;

  std::vector<ManifestEntry>& at(Partition partition);
  const std::vector<ManifestEntry>& at(Partition partition) const;
};

// images/{split}/*.png, labels/{split}/*.txt (always present, possibly
// empty) and manifest.json under `root`. When a recording carries a ground
// truth track, the label holds the disc's box at the window midpoint.
SplitManifest EmitDataset(const std::filesystem::path& root,
                          std::span<const Recording> recordings,
                          std::span<const SampledFrame> frames,
                          const SubjectSplit& split, unsigned threads = 1);

// Stable image stem: {subject}_{eye}_r{recording}_frame_{index:06}
std::string DatasetImageStem(const SampledFrame& frame);

}  // namespace evpupil

#endif  // EVPUPIL_DATASET_H_
