#pragma once

#include <iosfwd>
#include <cstdint>
#include <string>
#include <vector>

namespace combmat::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kVerifyFailed = 2,
  kIoFailure = 3,
};

/// Run one command line (without the program name).  Tables go to `out`,
/// diagnostics and generated seeds to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Suites accepted by `verify --suite`.
const std::vector<std::string>& verify_suites();

/// Run one suite (or "all"); prints one PASS/FAIL line per check and returns
/// true iff every check passed.
bool run_verify_suite(const std::string& suite, std::uint64_t seed, std::ostream& out);

}  // namespace combmat::cli
