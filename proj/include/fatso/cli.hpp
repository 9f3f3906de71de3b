#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fatso::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kDataError = 2,
  kConvergenceFailure = 3,
};

/// Runs one command line (without the program name). Results go to `out`
/// (or to --out PATH) as TSV, diagnostics to `err`. Nothing is written to
/// the result destination unless the command succeeds.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses a `key = value` config file into `--key value` arguments. Blank
/// lines and lines starting with '#' are skipped.
std::vector<std::string> read_config(const std::string& path);

}  // namespace fatso::cli
