// Acceptance battery for the energy-capture pipeline.  Runs the full
// Monte-Carlo sweep and the verification battery, then prints one PASS/FAIL
// line per numbered check.  Exit status is zero only when every check passes.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "uwbcap/sweep.hpp"
#include "uwbcap/verify.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool check_passes(const std::vector<uwbcap::CheckRow>& rows, const std::string& name) {
  for (const auto& row : rows)
    if (row.check == name) return row.pass;
  return false;
}

struct InversionStats {
  int count = 0;       ///< rungs that rise instead of falling
  double largest = 0;  ///< size of the biggest rise
};

InversionStats count_inversions(const std::vector<double>& sequence) {
  InversionStats stats;
  for (std::size_t i = 1; i < sequence.size(); ++i) {
    const double rise = sequence[i] - sequence[i - 1];
    if (rise > 0.0) {
      ++stats.count;
      stats.largest = std::max(stats.largest, rise);
    }
  }
  return stats;
}

struct Verdict {
  std::string label;
  bool pass = false;
};

}  // namespace

int main() {
  using uwbcap::SweepConfig;
  constexpr std::size_t kTotalChecks = 8;
  std::vector<Verdict> verdicts;

  try {
    const auto ladder = uwbcap::parse_bandwidth_ladder("4e6..1024e6x2");

    // Single-realization pass over the full ladder: tap counts and speed.
    SweepConfig quick;
    quick.bandwidths = ladder;
    quick.realizations = 1;
    auto start = std::chrono::steady_clock::now();
    const auto quick_report = uwbcap::run_sweep(quick);
    const double quick_seconds = seconds_since(start);
    std::printf("single-realization sweep: %.3f s\n", quick_seconds);

    const std::vector<long> expected_taps{1, 2, 4, 8, 17, 35, 71, 142, 285};
    bool taps_ok = quick_report.rows.size() == expected_taps.size();
    for (std::size_t i = 0; taps_ok && i < expected_taps.size(); ++i)
      taps_ok = quick_report.rows[i].taps == expected_taps[i];
    verdicts.push_back({"tap counts across the ladder are exactly 1,2,4,8,17,35,71,142,285 "
                        "in under 1 s",
                        taps_ok && quick_seconds < 1.0});

    // Full Monte-Carlo sweep, once on one thread and once on four.
    SweepConfig full;
    full.bandwidths = ladder;
    full.realizations = 100;
    full.master_seed = 1;
    full.threads = 1;
    full.output_path = "acceptance_run_a.csv";
    start = std::chrono::steady_clock::now();
    const auto run_a = uwbcap::run_sweep(full);
    const double full_seconds = seconds_since(start);
    std::printf("100-realization sweep: %.1f s\n", full_seconds);
    uwbcap::emit_report(run_a, full.output_path);

    SweepConfig rerun = full;
    rerun.threads = 4;
    rerun.output_path = "acceptance_run_b.csv";
    const auto run_b = uwbcap::run_sweep(rerun);
    uwbcap::emit_report(run_b, rerun.output_path);

    const auto& rows = run_a.rows;
    std::vector<double> worst_curve;
    std::vector<double> mean_curve;
    for (const auto& row : rows) {
      worst_curve.push_back(row.worst_penalty);
      mean_curve.push_back(row.mean_penalty);
    }

    bool wide_ok = !rows.empty() && rows.back().worst_penalty < 0.02;
    for (const auto& row : rows)
      if (row.taps > 10) wide_ok = wide_ok && row.worst_penalty < 0.10;
    verdicts.push_back({"widest-bandwidth worst penalty below 0.02 (below 0.10 past 10 taps), "
                        "sweep under 10 min",
                        wide_ok && full_seconds < 600.0});

    const bool narrow_ok = !rows.empty() && rows.front().mean_penalty > 0.15 &&
                           rows.front().worst_penalty > 0.30;
    verdicts.push_back({"narrowest-bandwidth penalties are large: mean above 0.15, worst above "
                        "0.30",
                        narrow_ok});

    const auto worst_inv = count_inversions(worst_curve);
    const auto mean_inv = count_inversions(mean_curve);
    std::printf("penalty inversions: worst %d (largest %.3g), mean %d (largest %.3g)\n",
                worst_inv.count, worst_inv.largest, mean_inv.count, mean_inv.largest);
    verdicts.push_back({"penalty curves fall with bandwidth, allowing one inversion under 0.01",
                        worst_inv.count <= 1 && worst_inv.largest < 0.01 &&
                            mean_inv.count <= 1 && mean_inv.largest < 0.01});

    // Verification battery with its default options.
    start = std::chrono::steady_clock::now();
    const auto checks = uwbcap::run_verification({});
    const double battery_seconds = seconds_since(start);
    uwbcap::print_check_table(checks);
    std::printf("verification battery: %.1f s\n", battery_seconds);

    const bool oracles_ok = check_passes(checks, "convolve_vs_direct") &&
                            check_passes(checks, "dft_vs_direct") &&
                            check_passes(checks, "sample_at_vs_sinc");
    verdicts.push_back({"fast convolution, transform, and off-grid evaluation match their "
                        "brute-force counterparts in under 1 min",
                        oracles_ok && battery_seconds < 60.0});

    verdicts.push_back({"time- and frequency-domain energies agree on the signal battery",
                        check_passes(checks, "plancherel")});

    const bool chain_ok = check_passes(checks, "approx1_nonincreasing") &&
                          check_passes(checks, "approx2_nonincreasing") &&
                          check_passes(checks, "approx3_nonincreasing") &&
                          check_passes(checks, "approx3_order") &&
                          check_passes(checks, "approx3_ratio_min") &&
                          check_passes(checks, "approx3_ratio_max") &&
                          check_passes(checks, "combination_bound");
    verdicts.push_back({"approximation discrepancies shrink down their ladders at the expected "
                        "rate and the combined bound holds",
                        chain_ok});

    const std::string aggregate_a = read_file("acceptance_run_a.csv");
    const std::string aggregate_b = read_file("acceptance_run_b.csv");
    const std::string detail_a = read_file("acceptance_run_a_detail.csv");
    const std::string detail_b = read_file("acceptance_run_b_detail.csv");
    const bool identical = !aggregate_a.empty() && !detail_a.empty() &&
                           aggregate_a == aggregate_b && detail_a == detail_b;
    verdicts.push_back({"reports are byte-identical across 1-thread and 4-thread runs",
                        identical});
  } catch (const std::exception& error) {
    std::printf("acceptance battery aborted: %s\n", error.what());
  }

  int passed = 0;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    std::printf("[%s] check %zu: %s\n", verdicts[i].pass ? "PASS" : "FAIL", i + 1,
                verdicts[i].label.c_str());
    passed += verdicts[i].pass ? 1 : 0;
  }
  std::printf("%d/%zu acceptance checks passed\n", passed, kTotalChecks);
  return passed == static_cast<int>(kTotalChecks) ? 0 : 1;
}
