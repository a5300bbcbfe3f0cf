#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace threadtrace::cli {

/// Exit codes of cli_main.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInternalError = 2;

/// Entry point of the `threadtrace` tool. `args` excludes the program name.
/// Subcommands: gen, reconstruct, eval, bench.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_main(int argc, const char* const* argv);

}  // namespace threadtrace::cli
