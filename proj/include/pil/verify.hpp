#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pil {

struct SuiteOptions {
  std::optional<unsigned> p;
  std::optional<unsigned> n;
  std::uint64_t seed = 1;
  unsigned trials = 20;
};

struct SuiteResult {
  std::uint64_t checks = 0;
  std::uint64_t failures = 0;
};

/// Names accepted by run_suite.
const std::vector<std::string>& suite_names();

/// Runs one invariant suite. Data rows (CSV) go to `out`, failure lines and the
/// summary to `log`. Throws std::invalid_argument for an unknown suite.
SuiteResult run_suite(const std::string& name, const SuiteOptions& opts, std::ostream& out, std::ostream& log);

}  // namespace pil
