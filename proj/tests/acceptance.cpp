// One pass/fail line per acceptance criterion. Exit status is nonzero if any criterion fails.

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>

#include "qmi/cli.hpp"
#include "qmi/verify.hpp"

namespace {

void print(const qmi::verify::CheckResult& r) {
  std::printf("%-5s %s  %s  [checked %ld, failed %ld, max error %.3e]  %s\n", r.id.c_str(), r.passed ? "PASS" : "FAIL",
              r.name.c_str(), r.checked, r.failed, r.max_error, r.detail.c_str());
  std::fflush(stdout);
}

// Runs the full `verify` job twice with the same seed and compares the serialized reports.
qmi::verify::CheckResult determinism(std::uint64_t seed) {
  qmi::cli::JobConfig job;
  job.command = "verify";
  job.seed = seed;
  const std::string config = "{}";
  std::string reports[2];
  int codes[2];
  for (int i = 0; i < 2; ++i) {
    std::ostringstream out;
    std::ostringstream err;
    codes[i] = qmi::cli::run_text(job, config, "<acceptance>", out, err);
    reports[i] = out.str();
  }
  qmi::verify::CheckResult r;
  r.id = "AC14";
  r.name = "repeated verify runs are byte-identical";
  r.checked = 1;
  r.passed = reports[0] == reports[1] && !reports[0].empty() && codes[0] == codes[1];
  r.failed = r.passed ? 0 : 1;
  r.detail = "two full verify reports, " + std::to_string(reports[0].size()) + " bytes, exit codes " +
             std::to_string(codes[0]) + "/" + std::to_string(codes[1]);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20240917;
  int failed = 0;
  for (int i = 1; i <= qmi::verify::kAcceptanceCount; ++i) {
    const auto r = qmi::verify::acceptance_criterion(i, seed);
    print(r);
    failed += r.passed ? 0 : 1;
  }
  const auto r = determinism(seed);
  print(r);
  failed += r.passed ? 0 : 1;
  std::printf("%d of %d criteria passed\n", qmi::verify::kAcceptanceCount + 1 - failed, qmi::verify::kAcceptanceCount + 1);
  return failed == 0 ? 0 : 1;
}
