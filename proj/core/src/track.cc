// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#include "evpupil/track.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <ostream>

#include "csv_util.h"
#include "evpupil/error.h"

namespace evpupil {

double Trajectory::MidpointUs(std::size_t frame_index) const {
  return static_cast<double>(origin_us) +
         (static_cast<double>(frame_index) + 0.5) * static_cast<double>(window_us);
}

std::vector<Gap> Trajectory::Gaps() const {
  std::vector<Gap> gaps;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const std::size_t missing = points[i].frame_index - points[i - 1].frame_index - 1;
    if (missing > 0) gaps.push_back({points[i - 1].frame_index + 1, missing});
  }
  return gaps;
}

std::optional<std::size_t> FrameIndexFromRef(std::string_view frame_ref) {
  const std::size_t slash = frame_ref.find_last_of("/\\");
  if (slash != std::string_view::npos) frame_ref.remove_prefix(slash + 1);
  const std::size_t dot = frame_ref.find_last_of('.');
  if (dot != std::string_view::npos) frame_ref = frame_ref.substr(0, dot);
  std::size_t start = frame_ref.size();
  while (start > 0 && std::isdigit(static_cast<unsigned char>(frame_ref[start - 1]))) {
    --start;
  }
  const auto value = internal::ParseUint(frame_ref.substr(start));
  if (!value) return std::nullopt;
  return static_cast<std::size_t>(*value);
}

BuildResult BuildTrajectory(std::span<const Detection> detections,
                            std::span<const WindowPlan> windows) {
  if (windows.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no windows to place detections in");
  }
  const WindowPlan& first = windows.front();
  const std::uint64_t window_us = first.t_end - first.t_start;
  if (window_us == 0 || first.t_start < first.index * window_us) {
    throw Error(ErrorCode::kInvalidArgument, "inconsistent window plan");
  }
  const std::uint64_t origin = first.t_start - first.index * window_us;
  std::map<std::size_t, const WindowPlan*> by_index;
  for (const WindowPlan& w : windows) {
    if (w.t_end - w.t_start != window_us || w.t_start != origin + w.index * window_us) {
      throw Error(ErrorCode::kInvalidArgument,
                  "window " + std::to_string(w.index) +
                      " does not tile with the others");
    }
    by_index[w.index] = &w;
  }

  BuildResult result;
  result.trajectory.origin_us = origin;
  result.trajectory.window_us = window_us;
  std::map<std::size_t, const Detection*> best;
  std::map<std::size_t, std::size_t> seen;
  for (const Detection& d : detections) {
    const auto index = FrameIndexFromRef(d.frame_ref);
    if (!index || !by_index.contains(*index)) {
      throw Error(ErrorCode::kNotFound,
                  "detection references unknown window '" + d.frame_ref + "'");
    }
    ++seen[*index];
    auto [it, inserted] = best.try_emplace(*index, &d);
    if (!inserted && d.confidence > it->second->confidence) it->second = &d;
  }
  for (const auto& [index, count] : seen) {
    if (count > 1) {
      result.warnings.push_back(
          "frame " + std::to_string(index) + " has " + std::to_string(count) +
          " detections; kept the most confident");
    }
  }
  for (const auto& [index, d] : best) {
    TrajectoryPoint p;
    p.frame_index = index;
    p.t_mid_us = by_index[index]->MidpointUs();
    p.cx = d->box.center_x();
    p.cy = d->box.center_y();
    p.source = PointSource::kDetected;
    p.confidence = d->confidence;
    result.trajectory.points.push_back(p);
  }
  return result;
}

Trajectory InterpolateGaps(const Trajectory& trajectory,
                           std::size_t max_gap_frames) {
  Trajectory out;
  out.origin_us = trajectory.origin_us;
  out.window_us = trajectory.window_us;
  const auto& pts = trajectory.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0) {
      const TrajectoryPoint& a = pts[i - 1];
      const TrajectoryPoint& b = pts[i];
      const std::size_t missing = b.frame_index - a.frame_index - 1;
      if (missing > 0 && missing <= max_gap_frames) {
        for (std::size_t k = 1; k <= missing; ++k) {
          TrajectoryPoint p;
          p.frame_index = a.frame_index + k;
          p.t_mid_us = trajectory.MidpointUs(p.frame_index);
          const double s = (p.t_mid_us - a.t_mid_us) / (b.t_mid_us - a.t_mid_us);
          p.cx = a.cx + s * (b.cx - a.cx);
          p.cy = a.cy + s * (b.cy - a.cy);
          p.source = PointSource::kInterpolated;
          p.confidence = 0.0;
          out.points.push_back(p);
        }
      }
    }
    out.points.push_back(pts[i]);
  }
  return out;
}

std::vector<VelocitySample> ComputeVelocity(const Trajectory& trajectory,
                                            std::optional<double> px_per_degree) {
  const auto& pts = trajectory.points;
  if (pts.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "velocity needs at least 2 trajectory points");
  }
  if (px_per_degree && !(*px_per_degree > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "px_per_degree must be > 0");
  }
  std::vector<VelocitySample> out;
  out.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == pts.size() ? i : i + 1;
    const double dt_s = (pts[hi].t_mid_us - pts[lo].t_mid_us) * 1e-6;
    const double vx = (pts[hi].cx - pts[lo].cx) / dt_s;
    const double vy = (pts[hi].cy - pts[lo].cy) / dt_s;
    VelocitySample s;
    s.t_mid_us = pts[i].t_mid_us;
    s.speed_px_s = std::hypot(vx, vy);
    if (px_per_degree) s.speed_deg_s = s.speed_px_s / *px_per_degree;
    out.push_back(s);
  }
  return out;
}

std::vector<SaccadeInterval> FlagSaccadeCandidates(
    std::span<const VelocitySample> velocities, double threshold_deg_s,
    double min_duration_ms) {
  for (const VelocitySample& v : velocities) {
    if (!v.speed_deg_s) {
      throw Error(ErrorCode::kInvalidArgument,
                  "saccade flagging needs angular speeds (px_per_degree)");
    }
  }
  std::vector<SaccadeInterval> out;
  std::size_t i = 0;
  while (i < velocities.size()) {
    if (*velocities[i].speed_deg_s < threshold_deg_s) {
      ++i;
      continue;
    }
    std::size_t j = i;
    double peak = *velocities[i].speed_deg_s;
    while (j + 1 < velocities.size() &&
           *velocities[j + 1].speed_deg_s >= threshold_deg_s) {
      ++j;
      peak = std::max(peak, *velocities[j].speed_deg_s);
    }
    const double onset = velocities[i].t_mid_us;
    const double offset = velocities[j].t_mid_us;
    if ((offset - onset) / 1000.0 >= min_duration_ms) {
      out.push_back({onset, offset, peak});
    }
    i = j + 1;
  }
  return out;
}

void WriteTrajectoryCsv(std::ostream& out, const Trajectory& trajectory,
                        std::span<const VelocitySample> velocities) {
  const auto& pts = trajectory.points;
  if (!velocities.empty() && velocities.size() != pts.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "velocity samples do not match trajectory points");
  }
  const bool angular = !velocities.empty() && velocities.front().speed_deg_s;
  out << "t_us,cx,cy,source,confidence,speed_px_s";
  if (angular) out << ",speed_deg_s";
  out << '\n';
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const TrajectoryPoint& p = pts[i];
    out << internal::FormatDouble(p.t_mid_us) << ','
        << internal::FormatDouble(p.cx) << ',' << internal::FormatDouble(p.cy)
        << ',' << (p.source == PointSource::kDetected ? "detected" : "interpolated")
        << ',' << internal::FormatDouble(p.confidence) << ',';
    if (!velocities.empty()) out << internal::FormatDouble(velocities[i].speed_px_s);
    if (angular) out << ',' << internal::FormatDouble(*velocities[i].speed_deg_s);
    out << '\n';
  }
}

void WriteSaccadeCsv(std::ostream& out,
                     std::span<const SaccadeInterval> intervals) {
  out << "onset_us,offset_us,peak_deg_s\n";
  for (const SaccadeInterval& s : intervals) {
    out << internal::FormatDouble(s.onset_us) << ','
        << internal::FormatDouble(s.offset_us) << ','
        << internal::FormatDouble(s.peak_deg_s) << '\n';
  }
}

}  // namespace evpupil
