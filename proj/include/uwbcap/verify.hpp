#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace uwbcap {

/// One row of the verification battery: a named check, the scalar it measured,
/// the limit it was held to, and whether it passed.  `metric` says how to
/// read `value` against `limit` (most checks are "value <= limit"; order and
/// ratio checks state their own direction).
struct CheckRow {
  std::string check;
  std::string metric;
  double value{};
  double limit{};
  bool pass{};
};

struct VerificationOptions {
  int instances = 100;        ///< randomized instances per equivalence check
  std::uint64_t seed = 1;     ///< master seed for all battery draws
  int combination_cirs = 10;  ///< responses for the end-to-end bound check
};

/// Run the full battery: fast-path vs. brute-force equivalence (convolution,
/// transform, off-grid evaluation), time/frequency energy agreement, the
/// three convergence traces, and the end-to-end triangle bound on generated
/// responses.  Pure function of the options.
std::vector<CheckRow> run_verification(const VerificationOptions& options = {});

bool all_pass(const std::vector<CheckRow>& rows);

/// Aligned pass/fail table on standard output.
void print_check_table(const std::vector<CheckRow>& rows);

/// CSV with header `check,metric,value,limit,pass` (pass as 1/0).
void write_check_csv(const std::vector<CheckRow>& rows, const std::string& path);

}  // namespace uwbcap
