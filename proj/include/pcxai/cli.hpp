// SPDX-FileCopyrightText: 2026 The pcxai Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace pcxai::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

// args[0] is the program name. Returns the process exit code.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace pcxai::cli
