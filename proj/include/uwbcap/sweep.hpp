#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "uwbcap/cluster_model.hpp"

namespace uwbcap {

/// Configuration for the Monte-Carlo bandwidth sweep.  `source` selects where
/// the impulse responses come from: cluster-model parameters (drawn under
/// `master_seed`) or a CIR file path.  When a file is used, its declared delay
/// spread replaces `delay_spread` and `realizations = 0` means "all records".
struct SweepConfig {
  std::vector<double> bandwidths;  ///< Hz, strictly ascending
  int realizations = 100;
  std::uint64_t master_seed = 1;
  int phases = 4;      ///< sampling-phase hypotheses M per bandwidth
  int oversample = 16; ///< dense-grid oversampling Q relative to max bandwidth
  double delay_spread = 279e-9;  ///< seconds
  std::variant<ClusterModelParams, std::string> source = ClusterModelParams{};
  std::string output_path;  ///< aggregate CSV; detail CSV written beside it
  bool fixed_eps = false;   ///< reuse one unit draw per realization across bandwidths
  int threads = 1;
};

/// One (bandwidth, realization) cell of the sweep.
struct SweepRecord {
  double bandwidth{};
  long taps{};
  int realization{};
  double eps{};
  std::vector<double> gains;  ///< captured gain per sampling phase
  double penalty{};
};

/// Aggregate over all realizations at one bandwidth.
struct BandwidthSummary {
  double bandwidth{};
  long taps{};
  double worst_penalty{};  ///< max over realizations
  double mean_penalty{};
};

struct PenaltyReport {
  std::vector<BandwidthSummary> rows;  ///< ascending bandwidth
  std::vector<SweepRecord> records;    ///< grouped by bandwidth, realization ascending
  int phases = 0;
  double delay_spread = 0;  ///< the spread actually used (file's spread wins)
};

/// Run the sweep described by `config`.  Every (realization, bandwidth) cell
/// draws its timing offset from a dedicated substream, so the result is a pure
/// function of the config — independent of `threads` and scheduling.
/// Throws ConfigError for invalid configs (unsorted bandwidths, a bandwidth
/// that does not divide oversample x max bandwidth, bad counts) and propagates
/// I/O and parse errors from a file source.
PenaltyReport run_sweep(const SweepConfig& config);

/// Write `report` as CSV and print a summary table to standard output.
/// `path` receives the aggregate rows (`bandwidth_hz,L,P_max,P_mean`); the
/// per-realization records go to a second file beside it with suffix
/// `_detail`.  An empty `path` prints the summary only.
void emit_report(const PenaltyReport& report, const std::string& path);

/// Parse a bandwidth list: comma-separated values in Hz ("4e6,8e6,16e6") or a
/// geometric ladder "a..bxk" (from a to b inclusive, factor k; "x k" may be
/// omitted for factor 2).  Throws ConfigError on malformed input.
std::vector<double> parse_bandwidth_ladder(const std::string& text);

}  // namespace uwbcap
