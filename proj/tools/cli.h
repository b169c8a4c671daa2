// Copyright 2026 The evpupil Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef EVPUPIL_TOOLS_CLI_H_
#define EVPUPIL_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace evpupil::cli {

// Entry point shared by the binary and the tests. Returns the process exit
// code: 0 on success, 1 on a pipeline error, 2 on bad usage.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace evpupil::cli

#endif  // EVPUPIL_TOOLS_CLI_H_
