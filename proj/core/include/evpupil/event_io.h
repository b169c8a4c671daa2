// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef EVPUPIL_EVENT_IO_H_
#define EVPUPIL_EVENT_IO_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace evpupil {

// Polarity after normalization. Raw encodings 0/1 map to kOff/kOn.
enum class Polarity : std::int8_t { kOff = -1, kOn = 1 };

// One sensor change. x is the pixel column, y the pixel row.
struct Event {
  std::uint64_t t = 0;  // microseconds since stream origin
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  Polarity p = Polarity::kOn;

  friend bool operator==(const Event&, const Event&) = default;
};

struct SensorGeometry {
  std::uint32_t width = 346;
  std::uint32_t height = 260;

  bool Contains(std::uint32_t x, std::uint32_t y) const {
    return x < width && y < height;
  }
  std::size_t PixelCount() const {
    return static_cast<std::size_t>(width) * height;
  }
  // Throws kInvalidArgument when either extent is zero.
  void Validate() const;

  friend bool operator==(const SensorGeometry&,
                         const SensorGeometry&) = default;
};

// Parses "WxH" (e.g. "346x260").
SensorGeometry ParseGeometry(std::string_view text);

// Immutable, time-sorted, bounds-checked event sequence.
class EventStream {
 public:
  EventStream() = default;

  // Validates bounds and stable-sorts by timestamp.
  EventStream(SensorGeometry geometry, std::vector<Event> events);

  const SensorGeometry& geometry() const { return geometry_; }
  std::span<const Event> events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  // Only meaningful when the stream is nonempty.
  std::uint64_t t_min() const { return t_min_; }
  std::uint64_t t_max() const { return t_max_; }

  friend bool operator==(const EventStream&, const EventStream&) = default;

 private:
  SensorGeometry geometry_;
  std::vector<Event> events_;
  std::uint64_t t_min_ = 0;
  std::uint64_t t_max_ = 0;
};

enum class EventFormat { kCsv, kBinaryLe };

// Picks kBinaryLe for ".bin"/".raw" extensions, kCsv otherwise.
EventFormat FormatFromPath(const std::filesystem::path& path);
EventFormat ParseEventFormat(std::string_view name);

struct ParseOptions {
  // Interpret the second and third columns as (y, x) instead of (x, y).
  bool swap_xy = false;
};

// Size of one record in the binary format: u64 t, u16 x, u16 y, i8 p.
inline constexpr std::size_t kBinaryRecordSize = 13;

// Reads and validates a whole stream. Throws Error with kParse (line number or
// byte offset in the message), kOutOfRange for coordinates outside the
// sensor, and kEmptyStream when no records are present.
EventStream ParseEvents(std::istream& source, EventFormat format,
                        const SensorGeometry& geometry,
                        const ParseOptions& options = {});
EventStream ParseEventsFile(const std::filesystem::path& path,
                            EventFormat format,
                            const SensorGeometry& geometry,
                            const ParseOptions& options = {});

// CSV output always carries the "t,x,y,p" header and writes p as 1/-1.
void WriteEventsCsv(std::ostream& out, const EventStream& stream);
void WriteEventsBinary(std::ostream& out, const EventStream& stream);
void WriteEventsFile(const std::filesystem::path& path, EventFormat format,
                     const EventStream& stream);

}  // namespace evpupil

#endif  // EVPUPIL_EVENT_IO_H_
