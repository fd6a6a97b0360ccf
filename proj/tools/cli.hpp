#pragma once

#include <iosfwd>

namespace jtel::cli {

// Exit codes.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitArbitrage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInfeasible = 4;

/// Entry point of the command-line tool with injectable streams.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jtel::cli
