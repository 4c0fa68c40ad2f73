#pragma once

#include <string>
#include <vector>

namespace confront {

/// Command-line entry point. Subcommands: eig, alpha0, profile, energy,
/// front, speed-curve, spread, extinction, csd-profile, csd-front,
/// csd-phase, oracle-1d.
///
/// Exit codes: 0 success, 1 solver failure, 2 configuration error.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace confront
