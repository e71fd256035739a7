#ifndef CSVORTEX_CLI_HPP
#define CSVORTEX_CLI_HPP

#include <string>
#include <vector>

namespace csvortex {

/// Full command-line surface (subcommands: graph, solve, critical, sweep,
/// mountain). args excludes the program name. Exit codes: 0 converged/success,
/// 1 usage or runtime error, 2 diverged, 3 stalled.
int cli_main(const std::vector<std::string>& args);

} // namespace csvortex

#endif
