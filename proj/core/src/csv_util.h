// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef EVPUPIL_SRC_CSV_UTIL_H_
#define EVPUPIL_SRC_CSV_UTIL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evpupil::internal {

std::string_view StripLineEnding(std::string_view line);
std::string_view Trim(std::string_view text);
// Comma-separated fields, surrounding whitespace trimmed.
std::vector<std::string_view> SplitFields(std::string_view line,
                                          char delimiter = ',');

std::optional<std::uint64_t> ParseUint(std::string_view text);
std::optional<std::int64_t> ParseInt(std::string_view text);
std::optional<double> ParseDouble(std::string_view text);

// Shortest representation that round-trips.
std::string FormatDouble(double value);
// Fixed notation with the given number of decimals.
std::string FormatFixed(double value, int decimals);

}  // namespace evpupil::internal

#endif  // EVPUPIL_SRC_CSV_UTIL_H_
