// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef EVPUPIL_BOX_H_
#define EVPUPIL_BOX_H_

namespace evpupil {

// Axis-aligned box in pixel coordinates.
struct Box {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x_min + x_max); }
  double center_y() const { return 0.5 * (y_min + y_max); }
  bool degenerate() const { return !(x_min < x_max && y_min < y_max); }

  friend bool operator==(const Box&, const Box&) = default;
};

}  // namespace evpupil

#endif  // EVPUPIL_BOX_H_
