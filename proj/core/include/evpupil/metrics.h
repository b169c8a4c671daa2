// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef EVPUPIL_METRICS_H_
#define EVPUPIL_METRICS_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evpupil/box.h"
#include "evpupil/detect.h"

namespace evpupil {

struct GroundTruth {
  std::string frame_ref;
  int class_id = 0;
  Box box;
};

// Intersection over union. Throws kInvalidArgument on a degenerate box.
double Iou(const Box& a, const Box& b);

struct MatchConfig {
  double iou_threshold = 0.5;
  double confidence_threshold = 0.25;

  friend bool operator==(const MatchConfig&, const MatchConfig&) = default;
};

struct DetectionOutcome {
  std::size_t input_index = 0;
  double confidence = 0.0;
  bool true_positive = false;
  std::optional<std::size_t> matched_truth;
  double iou = 0.0;  // with the matched truth, 0 for false positives
};

struct MatchResult {
  // Kept detections (confidence >= threshold) in processing order:
  // descending confidence, then higher best IoU, then input order.
  std::vector<DetectionOutcome> detections;
  std::vector<bool> truth_matched;
  double iou_threshold = 0.5;
  double confidence_threshold = 0.0;

  std::size_t tp() const;
  std::size_t fp() const;
  std::size_t fn() const;
};

// Greedy matching within each (frame, class). A detection takes the
// unmatched truth with the highest IoU >= threshold, else it is a false
// positive.
MatchResult MatchDetections(std::span<const Detection> detections,
                            std::span<const GroundTruth> truths,
                            const MatchConfig& config);

struct PrecisionRecallF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Harmonic mean; 0 when both inputs are 0.
double F1Score(double precision, double recall);
// precision is 1 with no predictions, recall is 1 with no truths.
PrecisionRecallF1 ComputePrecisionRecallF1(const MatchResult& match);

struct PrPoint {
  double confidence = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

// One point per distinct confidence, from highest to lowest. Tied
// confidences enter the curve together.
std::vector<PrPoint> PrecisionRecallCurve(std::span<const Detection> detections,
                                          std::span<const GroundTruth> truths,
                                          double iou_threshold = 0.5);

// All-points AP: area under the monotone precision envelope of the PR curve.
// Pools every class. Throws kInvalidArgument when there are no truths.
double AveragePrecision(std::span<const Detection> detections,
                        std::span<const GroundTruth> truths,
                        double iou_threshold = 0.5);

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::map<int, double> ap;  // per class present in the truths
  double map = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double iou_threshold = 0.5;
  double confidence_threshold = 0.25;
  std::vector<PrPoint> pr_curve;  // pooled over classes
};

// Single-point P/R/F1 at the confidence threshold plus per-class AP (no
// confidence cut) and their mean.
EvalReport Evaluate(std::span<const Detection> detections,
                    std::span<const GroundTruth> truths,
                    const MatchConfig& config);

void WriteReportJson(std::ostream& out, const EvalReport& report);
// Columns: confidence,precision,recall
void WritePrCurveCsv(std::ostream& out, std::span<const PrPoint> curve);

}  // namespace evpupil

#endif  // EVPUPIL_METRICS_H_
