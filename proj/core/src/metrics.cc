// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#include "evpupil/metrics.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <tuple>

#include <json.hpp>

#include "csv_util.h"
#include "evpupil/error.h"

namespace evpupil {

double Iou(const Box& a, const Box& b) {
  if (a.degenerate() || b.degenerate()) {
    throw Error(ErrorCode::kInvalidArgument, "IoU of a degenerate box");
  }
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::size_t MatchResult::tp() const {
  return static_cast<std::size_t>(std::count_if(
      detections.begin(), detections.end(),
      [](const DetectionOutcome& o) { return o.true_positive; }));
}

std::size_t MatchResult::fp() const { return detections.size() - tp(); }

std::size_t MatchResult::fn() const {
  return static_cast<std::size_t>(
      std::count(truth_matched.begin(), truth_matched.end(), false));
}

MatchResult MatchDetections(std::span<const Detection> detections,
                            std::span<const GroundTruth> truths,
                            const MatchConfig& config) {
  using Key = std::pair<std::string_view, int>;
  std::map<Key, std::vector<std::size_t>> truths_by_key;
  for (std::size_t t = 0; t < truths.size(); ++t) {
    if (truths[t].box.degenerate()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "degenerate ground truth box in " + truths[t].frame_ref);
    }
    truths_by_key[{truths[t].frame_ref, truths[t].class_id}].push_back(t);
  }
  static const std::vector<std::size_t> kNone;
  const auto group_of = [&](const Detection& d) -> const std::vector<std::size_t>& {
    const auto it = truths_by_key.find({d.frame_ref, d.class_id});
    return it == truths_by_key.end() ? kNone : it->second;
  };

  struct Pending {
    std::size_t index;
    double confidence;
    double best_iou;
  };
  std::vector<Pending> order;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const Detection& d = detections[i];
    if (d.confidence < config.confidence_threshold) continue;
    double best = 0.0;
    for (const std::size_t t : group_of(d)) {
      best = std::max(best, Iou(d.box, truths[t].box));
    }
    order.push_back({i, d.confidence, best});
  }
  std::sort(order.begin(), order.end(), [](const Pending& a, const Pending& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.best_iou != b.best_iou) return a.best_iou > b.best_iou;
    return a.index < b.index;
  });

  MatchResult result;
  result.iou_threshold = config.iou_threshold;
  result.confidence_threshold = config.confidence_threshold;
  result.truth_matched.assign(truths.size(), false);
  result.detections.reserve(order.size());
  for (const Pending& p : order) {
    const Detection& d = detections[p.index];
    DetectionOutcome outcome;
    outcome.input_index = p.index;
    outcome.confidence = d.confidence;
    double best = -1.0;
    std::optional<std::size_t> best_truth;
    for (const std::size_t t : group_of(d)) {
      if (result.truth_matched[t]) continue;
      const double v = Iou(d.box, truths[t].box);
      if (v > best) {
        best = v;
        best_truth = t;
      }
    }
    if (best_truth && best >= config.iou_threshold) {
      result.truth_matched[*best_truth] = true;
      outcome.true_positive = true;
      outcome.matched_truth = best_truth;
      outcome.iou = best;
    }
    result.detections.push_back(outcome);
  }
  return result;
}

double F1Score(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

PrecisionRecallF1 ComputePrecisionRecallF1(const MatchResult& match) {
  const double tp = static_cast<double>(match.tp());
  const double fp = static_cast<double>(match.fp());
  const double fn = static_cast<double>(match.fn());
  PrecisionRecallF1 out;
  out.precision = tp + fp > 0.0 ? tp / (tp + fp) : 1.0;
  out.recall = tp + fn > 0.0 ? tp / (tp + fn) : 1.0;
  out.f1 = F1Score(out.precision, out.recall);
  return out;
}

std::vector<PrPoint> PrecisionRecallCurve(std::span<const Detection> detections,
                                          std::span<const GroundTruth> truths,
                                          double iou_threshold) {
  std::vector<PrPoint> curve;
  if (truths.empty()) return curve;
  const MatchResult match = MatchDetections(
      detections, truths,
      {iou_threshold, -std::numeric_limits<double>::infinity()});
  const double n_truth = static_cast<double>(truths.size());
  double tp = 0.0;
  double fp = 0.0;
  const auto& outcomes = match.detections;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    (outcomes[i].true_positive ? tp : fp) += 1.0;
    const bool last_of_tie = i + 1 == outcomes.size() ||
                             outcomes[i + 1].confidence != outcomes[i].confidence;
    if (last_of_tie) {
      curve.push_back({outcomes[i].confidence, tp / (tp + fp), tp / n_truth});
    }
  }
  return curve;
}

namespace {

double AreaUnderEnvelope(const std::vector<PrPoint>& curve) {
  // Suffix maximum turns precision into a monotone envelope.
  std::vector<double> envelope(curve.size());
  double running = 0.0;
  for (std::size_t i = curve.size(); i-- > 0;) {
    running = std::max(running, curve[i].precision);
    envelope[i] = running;
  }
  double area = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    area += (curve[i].recall - prev_recall) * envelope[i];
    prev_recall = curve[i].recall;
  }
  return area;
}

}  // namespace

double AveragePrecision(std::span<const Detection> detections,
                        std::span<const GroundTruth> truths,
                        double iou_threshold) {
  if (truths.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no ground truths present");
  }
  return AreaUnderEnvelope(
      PrecisionRecallCurve(detections, truths, iou_threshold));
}

EvalReport Evaluate(std::span<const Detection> detections,
                    std::span<const GroundTruth> truths,
                    const MatchConfig& config) {
  if (truths.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no ground truths present");
  }
  EvalReport report;
  report.iou_threshold = config.iou_threshold;
  report.confidence_threshold = config.confidence_threshold;

  const MatchResult match = MatchDetections(detections, truths, config);
  const PrecisionRecallF1 prf = ComputePrecisionRecallF1(match);
  report.precision = prf.precision;
  report.recall = prf.recall;
  report.f1 = prf.f1;
  report.tp = match.tp();
  report.fp = match.fp();
  report.fn = match.fn();

  std::set<int> classes;
  for (const GroundTruth& t : truths) classes.insert(t.class_id);
  double sum = 0.0;
  for (const int c : classes) {
    std::vector<Detection> class_dets;
    std::vector<GroundTruth> class_truths;
    for (const Detection& d : detections) {
      if (d.class_id == c) class_dets.push_back(d);
    }
    for (const GroundTruth& t : truths) {
      if (t.class_id == c) class_truths.push_back(t);
    }
    const double ap = AveragePrecision(class_dets, class_truths, config.iou_threshold);
    report.ap[c] = ap;
    sum += ap;
  }
  report.map = sum / static_cast<double>(classes.size());
  report.pr_curve = PrecisionRecallCurve(detections, truths, config.iou_threshold);
  return report;
}

void WriteReportJson(std::ostream& out, const EvalReport& report) {
  nlohmann::json ap = nlohmann::json::object();
  for (const auto& [c, v] : report.ap) ap[std::to_string(c)] = v;
  nlohmann::json doc = {{"precision", report.precision},
                        {"recall", report.recall},
                        {"f1", report.f1},
                        {"ap", ap},
                        {"map", report.map},
                        {"tp", report.tp},
                        {"fp", report.fp},
                        {"fn", report.fn},
                        {"iou_threshold", report.iou_threshold},
                        {"confidence_threshold", report.confidence_threshold}};
  out << doc.dump(2) << '\n';
}

void WritePrCurveCsv(std::ostream& out, std::span<const PrPoint> curve) {
  out << "confidence,precision,recall\n";
  for (const PrPoint& p : curve) {
    out << internal::FormatDouble(p.confidence) << ','
        << internal::FormatDouble(p.precision) << ','
        << internal::FormatDouble(p.recall) << '\n';
  }
}

}  // namespace evpupil
