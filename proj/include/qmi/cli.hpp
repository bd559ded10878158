#pragma once

// Batch front end behind the `qmi` executable.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qmi::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kConsistency = 2 };

struct JobConfig {
  std::string command;
  std::string config_path;
  /// Overrides the config's master seed.
  std::optional<std::uint64_t> seed;
  /// Report entropies in bits instead of nats.
  bool bits = false;
  bool csv = false;
  /// Empty writes to the output stream.
  std::string out_path;
};

const std::vector<std::string>& commands();

/// Loads the config file and runs the job. Diagnostics go to `err`.
int run(const JobConfig& job, std::ostream& out, std::ostream& err);

/// Same, with the config supplied as text; `source` names it in error messages.
int run_text(const JobConfig& job, const std::string& config_text, const std::string& source, std::ostream& out,
             std::ostream& err);

/// Parses argv and runs the job.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(const std::string& bytes);

}  // namespace qmi::cli
