#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace proxweb::cli {

// Process exit codes.
enum ExitStatus : int {
  kExitOk = 0,
  kExitDomainError = 1,
  kExitUsage = 2,
};

// Runs one `proxweb` command line (without the program name). Data goes to
// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace proxweb::cli
