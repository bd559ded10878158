#pragma once

// Randomized invariant suites for every module, plus the numbered acceptance criteria.
// Everything is driven by one master seed, so a report is a pure function of that seed.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qmi::verify {

struct CheckResult {
  std::string id;
  std::string name;
  bool passed = true;
  long checked = 0;
  long failed = 0;
  /// Largest error measured against the check's tolerance (0 for purely boolean checks).
  double max_error = 0.0;
  std::string detail;
};

struct SuiteReport {
  std::string name;
  std::vector<CheckResult> checks;

  long checked() const;
  long failed() const;
  bool passed() const { return failed() == 0; }
};

struct VerifyOptions {
  std::uint64_t seed = 20240917;
  /// Empty runs every suite.
  std::vector<std::string> suites;
};

/// operator-core, entropy, channels, mutual-entropy, cqc-capacity, entanglement, acceptance.
const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown name.
SuiteReport run_suite(const std::string& name, std::uint64_t seed);
std::vector<SuiteReport> run_verify(const VerifyOptions& options);

/// Acceptance criterion `number` (1..13).
CheckResult acceptance_criterion(int number, std::uint64_t seed);
constexpr int kAcceptanceCount = 13;

}  // namespace qmi::verify
