// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef EVPUPIL_ERROR_H_
#define EVPUPIL_ERROR_H_

#include <stdexcept>
#include <string>

namespace evpupil {

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kOutOfRange,
  kEmptyStream,
  kNotFound,
  kIo,
  kSchema,
  kMismatch,
};

const char* ErrorCodeName(ErrorCode code);

// All library failures surface as this exception type. The code lets callers
// (and tests) distinguish failure classes without matching on message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace evpupil

#endif  // EVPUPIL_ERROR_H_
