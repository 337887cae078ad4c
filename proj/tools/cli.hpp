#ifndef HGMM_TOOLS_CLI_HPP
#define HGMM_TOOLS_CLI_HPP

#include <iosfwd>

namespace hgmm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `hgmm` tool. argv[0] is the program name. Normal output
/// goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hgmm::cli

#endif  // HGMM_TOOLS_CLI_HPP
