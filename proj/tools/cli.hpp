#pragma once

#include <iosfwd>

namespace lossyint::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Parses argv (argv[0] is the program name) and runs one subcommand.
// Messages go to out/err; the return value is the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lossyint::cli
