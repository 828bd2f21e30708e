// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace auric {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line. `args` includes the program name. The store defaults to
/// $AURIC_STORE, then ./auric-store.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace auric
