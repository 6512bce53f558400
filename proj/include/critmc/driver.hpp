#pragma once

#include <iosfwd>
#include <string>

#include "critmc/config.hpp"

namespace critmc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;      // config / usage errors
inline constexpr int kExitAssumption = 3;  // model assumption failed
inline constexpr int kExitRuntime = 4;     // runtime abort (overflow etc.)

// Executes one subcommand (validate, simulate, tail, constants,
// poisson-check, kesten-baseline), writing artifacts under the config's
// output directory. Returns the process exit code.
int run_subcommand(const std::string& cmd, const RunConfig& cfg,
                   std::ostream& log);

}  // namespace critmc
