// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#include "evpupil/png_io.h"

#include <png.h>

#include <cstring>
#include <string>

#include "evpupil/error.h"

namespace evpupil {

void WriteGrayPng(const std::filesystem::path& path,
                  const SensorGeometry& geometry,
                  const std::vector<std::uint8_t>& pixels) {
  if (pixels.size() != geometry.PixelCount()) {
    throw Error(ErrorCode::kInvalidArgument,
                "pixel buffer does not match geometry");
  }
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = geometry.width;
  image.height = geometry.height;
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0,
                               pixels.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kIo,
                "cannot write " + path.string() + ": " + message);
  }
}

void WriteFramePng(const std::filesystem::path& path, const Frame& frame) {
  WriteGrayPng(path, frame.geometry, frame.pixels);
}

GrayImage ReadGrayPng(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw Error(ErrorCode::kIo,
                "cannot read " + path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  GrayImage out;
  out.geometry = {image.width, image.height};
  out.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::kIo,
                "cannot decode " + path.string() + ": " + message);
  }
  return out;
}

}  // namespace evpupil
