#ifndef BNEB_TOOLS_CLI_HPP
#define BNEB_TOOLS_CLI_HPP

#include <iosfwd>

namespace bneb::cli {

/// Exit codes of the bneb tool.
enum ExitCode : int {
	kOk = 0,
	kUsage = 1,
	kValidation = 2,
	kNumerical = 3,
};

/// Runs the command line against the given streams and returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bneb::cli

#endif  // BNEB_TOOLS_CLI_HPP
