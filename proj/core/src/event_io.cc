// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#include "evpupil/event_io.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "csv_util.h"
#include "evpupil/error.h"

namespace evpupil {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kOutOfRange: return "out of range";
    case ErrorCode::kEmptyStream: return "empty stream";
    case ErrorCode::kNotFound: return "not found";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kSchema: return "schema violation";
    case ErrorCode::kMismatch: return "mismatch";
  }
  return "unknown";
}

void SensorGeometry::Validate() const {
  if (width == 0 || height == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "sensor geometry must be positive, got " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
  if (width > 65536 || height > 65536) {
    throw Error(ErrorCode::kInvalidArgument,
                "sensor geometry exceeds 16-bit coordinates");
  }
}

SensorGeometry ParseGeometry(std::string_view text) {
  const std::size_t sep = text.find_first_of("xX");
  if (sep == std::string_view::npos) {
    throw Error(ErrorCode::kParse,
                "geometry must look like WxH, got '" + std::string(text) + "'");
  }
  const auto w = internal::ParseUint(internal::Trim(text.substr(0, sep)));
  const auto h = internal::ParseUint(internal::Trim(text.substr(sep + 1)));
  if (!w || !h) {
    throw Error(ErrorCode::kParse,
                "geometry must look like WxH, got '" + std::string(text) + "'");
  }
  SensorGeometry g{static_cast<std::uint32_t>(*w),
                   static_cast<std::uint32_t>(*h)};
  g.Validate();
  return g;
}

EventStream::EventStream(SensorGeometry geometry, std::vector<Event> events)
    : geometry_(geometry), events_(std::move(events)) {
  geometry_.Validate();
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const Event& e = events_[i];
    if (!geometry_.Contains(e.x, e.y)) {
      throw Error(ErrorCode::kOutOfRange,
                  "event " + std::to_string(i) + " at (" +
                      std::to_string(e.x) + "," + std::to_string(e.y) +
                      ") outside " + std::to_string(geometry_.width) + "x" +
                      std::to_string(geometry_.height) + " sensor");
    }
    if (e.p != Polarity::kOn && e.p != Polarity::kOff) {
      throw Error(ErrorCode::kOutOfRange,
                  "event " + std::to_string(i) + " has invalid polarity");
    }
  }
  if (!std::is_sorted(events_.begin(), events_.end(),
                      [](const Event& a, const Event& b) { return a.t < b.t; })) {
    std::stable_sort(events_.begin(), events_.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
  }
  if (!events_.empty()) {
    t_min_ = events_.front().t;
    t_max_ = events_.back().t;
  }
}

EventFormat FormatFromPath(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".bin" || ext == ".raw") return EventFormat::kBinaryLe;
  return EventFormat::kCsv;
}

EventFormat ParseEventFormat(std::string_view name) {
  if (name == "csv") return EventFormat::kCsv;
  if (name == "bin" || name == "binary" || name == "binary_le") {
    return EventFormat::kBinaryLe;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown event format '" + std::string(name) + "'");
}

namespace {

std::optional<Polarity> NormalizePolarity(std::int64_t raw) {
  if (raw == 1) return Polarity::kOn;
  if (raw == 0 || raw == -1) return Polarity::kOff;
  return std::nullopt;
}

[[noreturn]] void ThrowLine(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kParse,
              "line " + std::to_string(line_no) + ": " + what);
}

Event CheckedEvent(std::uint64_t t, std::uint64_t a, std::uint64_t b,
                   Polarity p, const SensorGeometry& geometry,
                   const ParseOptions& options, const std::string& where) {
  const std::uint64_t x = options.swap_xy ? b : a;
  const std::uint64_t y = options.swap_xy ? a : b;
  if (x >= geometry.width || y >= geometry.height) {
    throw Error(ErrorCode::kOutOfRange,
                where + ": coordinate (" + std::to_string(x) + "," +
                    std::to_string(y) + ") outside " +
                    std::to_string(geometry.width) + "x" +
                    std::to_string(geometry.height) + " sensor");
  }
  return Event{t, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
               p};
}

std::vector<Event> ParseCsv(std::istream& source,
                            const SensorGeometry& geometry,
                            const ParseOptions& options) {
  std::vector<Event> events;
  std::string line;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (std::getline(source, line)) {
    ++line_no;
    const std::string_view body = internal::Trim(internal::StripLineEnding(line));
    if (body.empty()) continue;
    const auto fields = internal::SplitFields(body);
    const bool first = !seen_content;
    seen_content = true;
    if (fields.size() != 4) {
      if (first && !internal::ParseUint(fields[0])) continue;  // header
      ThrowLine(line_no, "expected 4 fields t,x,y,p, got " +
                             std::to_string(fields.size()));
    }
    const auto t = internal::ParseUint(fields[0]);
    if (!t && first) continue;  // header such as "t,x,y,p"
    const auto a = internal::ParseUint(fields[1]);
    const auto b = internal::ParseUint(fields[2]);
    const auto raw_p = internal::ParseInt(fields[3]);
    if (!t) ThrowLine(line_no, "bad timestamp '" + std::string(fields[0]) + "'");
    if (!a || !b) ThrowLine(line_no, "bad coordinate");
    if (!raw_p) ThrowLine(line_no, "bad polarity '" + std::string(fields[3]) + "'");
    const auto p = NormalizePolarity(*raw_p);
    if (!p) ThrowLine(line_no, "polarity must be 0/1 or -1/+1");
    events.push_back(CheckedEvent(*t, *a, *b, *p, geometry, options,
                                  "line " + std::to_string(line_no)));
  }
  if (source.bad()) throw Error(ErrorCode::kIo, "read failure");
  return events;
}

std::uint64_t LoadLe(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::vector<Event> ParseBinary(std::istream& source,
                               const SensorGeometry& geometry,
                               const ParseOptions& options) {
  std::vector<Event> events;
  std::array<unsigned char, kBinaryRecordSize> rec{};
  std::size_t offset = 0;
  for (;;) {
    source.read(reinterpret_cast<char*>(rec.data()), rec.size());
    const auto got = static_cast<std::size_t>(source.gcount());
    if (got == 0) break;
    if (got != rec.size()) {
      throw Error(ErrorCode::kParse,
                  "offset " + std::to_string(offset) + ": truncated record (" +
                      std::to_string(got) + " of " +
                      std::to_string(kBinaryRecordSize) + " bytes)");
    }
    const std::uint64_t t = LoadLe(rec.data(), 8);
    const std::uint64_t a = LoadLe(rec.data() + 8, 2);
    const std::uint64_t b = LoadLe(rec.data() + 10, 2);
    const auto raw_p = static_cast<std::int8_t>(rec[12]);
    const auto p = NormalizePolarity(raw_p);
    if (!p) {
      throw Error(ErrorCode::kParse, "offset " + std::to_string(offset) +
                                         ": polarity byte " +
                                         std::to_string(raw_p));
    }
    events.push_back(CheckedEvent(t, a, b, *p, geometry, options,
                                  "offset " + std::to_string(offset)));
    offset += kBinaryRecordSize;
  }
  if (source.bad()) throw Error(ErrorCode::kIo, "read failure");
  return events;
}

}  // namespace

EventStream ParseEvents(std::istream& source, EventFormat format,
                        const SensorGeometry& geometry,
                        const ParseOptions& options) {
  geometry.Validate();
  std::vector<Event> events = format == EventFormat::kCsv
                                  ? ParseCsv(source, geometry, options)
                                  : ParseBinary(source, geometry, options);
  if (events.empty()) throw Error(ErrorCode::kEmptyStream, "empty stream");
  return EventStream(geometry, std::move(events));
}

EventStream ParseEventsFile(const std::filesystem::path& path,
                            EventFormat format, const SensorGeometry& geometry,
                            const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return ParseEvents(in, format, geometry, options);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void WriteEventsCsv(std::ostream& out, const EventStream& stream) {
  out << "t,x,y,p\n";
  std::string line;
  for (const Event& e : stream.events()) {
    line.clear();
    line += std::to_string(e.t);
    line += ',';
    line += std::to_string(e.x);
    line += ',';
    line += std::to_string(e.y);
    line += e.p == Polarity::kOn ? ",1\n" : ",-1\n";
    out << line;
  }
}

void WriteEventsBinary(std::ostream& out, const EventStream& stream) {
  std::array<unsigned char, kBinaryRecordSize> rec{};
  for (const Event& e : stream.events()) {
    for (int i = 0; i < 8; ++i) rec[i] = static_cast<unsigned char>(e.t >> (8 * i));
    rec[8] = static_cast<unsigned char>(e.x);
    rec[9] = static_cast<unsigned char>(e.x >> 8);
    rec[10] = static_cast<unsigned char>(e.y);
    rec[11] = static_cast<unsigned char>(e.y >> 8);
    rec[12] = static_cast<unsigned char>(static_cast<std::int8_t>(e.p));
    out.write(reinterpret_cast<const char*>(rec.data()), rec.size());
  }
}

void WriteEventsFile(const std::filesystem::path& path, EventFormat format,
                     const EventStream& stream) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  if (format == EventFormat::kCsv) {
    WriteEventsCsv(out, stream);
  } else {
    WriteEventsBinary(out, stream);
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace evpupil
