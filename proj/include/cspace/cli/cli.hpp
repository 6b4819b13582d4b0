#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cspace {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

/// Entry point of the command-line tool; `args` excludes the program name.
/// Subcommands: impute, evaluate, layout, serve, synth.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cspace
