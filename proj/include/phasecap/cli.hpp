#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phasecap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitAdmissibility = 3;
inline constexpr int kExitNonConvergence = 4;

/// Runs one command. `args` excludes the program name. Reports go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phasecap::cli
