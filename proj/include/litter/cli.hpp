#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace litter {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitPartial = 2;
inline constexpr int kExitUsage = 64;

// Environment variable holding an ISO-8601 UTC time that replaces the wall
// clock for run timestamps.
inline constexpr const char* kNowEnv = "LITTER_NOW";

// Entry point for the `littermap` tool. args[0] is the program name.
// Subcommands: exif, locate, evaluate, map, synth, roundtrip.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace litter
