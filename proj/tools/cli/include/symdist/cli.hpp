#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace symdist::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_validation = 2;
inline constexpr int exit_audit = 3;
inline constexpr int exit_usage = 64;

/// Runs one command line (without the program name). Subcommands: encode,
/// decode, distance, audit, diagnose, simulate, serve.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// Shortest decimal form that round-trips ("0", "5", "2.5").
std::string format_distance(double value);

}  // namespace symdist::cli
