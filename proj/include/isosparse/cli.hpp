#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace isosparse {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_failure = 2 };

enum class Sabotage { none, h_offset };

struct SelftestOptions {
    std::size_t cases = 1000;
    Sabotage sabotage = Sabotage::none;
    std::uint64_t seed = 42;
};

/// Oracle agreement, search equivalence, frame and solver checks. Prints one
/// line per check and returns exit_ok iff all pass.
int run_selftest(const SelftestOptions &options, std::ostream &out);

/// Entry point of the command-line tool; args excludes the program name.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace isosparse
