// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef EVPUPIL_PNG_IO_H_
#define EVPUPIL_PNG_IO_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "evpupil/event_io.h"
#include "evpupil/framegen.h"

namespace evpupil {

struct GrayImage {
  SensorGeometry geometry;
  std::vector<std::uint8_t> pixels;  // row-major
};

// Lossless 8-bit grayscale PNG. Output bytes depend only on the pixels.
void WriteGrayPng(const std::filesystem::path& path,
                  const SensorGeometry& geometry,
                  const std::vector<std::uint8_t>& pixels);
void WriteFramePng(const std::filesystem::path& path, const Frame& frame);

// Any PNG is converted to 8-bit gray on read.
GrayImage ReadGrayPng(const std::filesystem::path& path);

}  // namespace evpupil

#endif  // EVPUPIL_PNG_IO_H_
