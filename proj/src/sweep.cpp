#include "uwbcap/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include "uwbcap/candidates.hpp"
#include "uwbcap/cir_io.hpp"
#include "uwbcap/errors.hpp"
#include "uwbcap/rng.hpp"

namespace uwbcap {

namespace {

constexpr std::uint64_t kOffsetKey = 0x6f66662d64726177;  // substream tag: offset draws

void validate(const SweepConfig& config) {
  if (config.phases < 2) throw ConfigError("phase count must be at least 2");
  if (config.oversample < 1) throw ConfigError("oversample factor must be at least 1");
  if (!(config.delay_spread > 0)) throw ConfigError("delay spread must be positive");
  if (config.threads < 1) throw ConfigError("thread count must be at least 1");
  if (config.realizations < 0) throw ConfigError("realization count must be nonnegative");
  if (config.realizations == 0 && std::holds_alternative<ClusterModelParams>(config.source))
    throw ConfigError("realization count must be positive when generating responses");
  double prev = 0;
  for (const double w : config.bandwidths) {
    if (!(w > prev)) throw ConfigError("bandwidths must be positive and strictly ascending");
    prev = w;
  }
  if (config.bandwidths.empty()) return;
  const double grid_rate = config.oversample * config.bandwidths.back();
  for (const double w : config.bandwidths) {
    const double stride = grid_rate / w;
    if (std::abs(stride - std::round(stride)) > 1e-9 * stride)
      throw ConfigError("bandwidth " + std::to_string(w) +
                        " Hz does not divide oversample x max bandwidth (" +
                        std::to_string(grid_rate) + " Hz)");
  }
}

std::vector<CirRecord> gather_responses(const SweepConfig& config, double grid_step) {
  if (const auto* path = std::get_if<std::string>(&config.source)) {
    auto records = load_cir_file(*path, grid_step);
    if (records.empty()) throw ConfigError("CIR file '" + *path + "' holds no records");
    const std::size_t wanted = config.realizations == 0
                                   ? records.size()
                                   : static_cast<std::size_t>(config.realizations);
    if (wanted > records.size())
      throw ConfigError("sweep needs " + std::to_string(wanted) + " records but '" + *path +
                        "' holds " + std::to_string(records.size()));
    records.resize(wanted);
    return records;
  }
  ClusterModelParams params = std::get<ClusterModelParams>(config.source);
  params.delay_spread = config.delay_spread;
  params.grid_step = grid_step;
  params.seed = config.master_seed;
  return generate_cirs(params, config.realizations);
}

void format_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string detail_path_for(const std::string& path) {
  const auto slash = path.find_last_of("/\\");
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + "_detail";
  return path.substr(0, dot) + "_detail" + path.substr(dot);
}

double parse_number(const std::string& text, std::size_t begin, std::size_t end) {
  double value{};
  const auto result = std::from_chars(text.data() + begin, text.data() + end, value);
  if (result.ec != std::errc{} || result.ptr != text.data() + end || !std::isfinite(value) ||
      value <= 0)
    throw ConfigError("bad bandwidth value '" + text.substr(begin, end - begin) + "'");
  return value;
}

}  // namespace

PenaltyReport run_sweep(const SweepConfig& config) {
  validate(config);

  PenaltyReport report;
  report.phases = config.phases;
  report.delay_spread = config.delay_spread;
  if (config.bandwidths.empty()) return report;

  const double grid_step = 1.0 / (config.oversample * config.bandwidths.back());
  const auto responses = gather_responses(config, grid_step);
  report.delay_spread = responses.front().response.delay_spread;

  const std::size_t n_real = responses.size();
  const std::size_t n_band = config.bandwidths.size();
  const std::size_t n_cell = n_real * n_band;
  std::vector<PenaltyRecord<double>> cells(n_cell);

  // Cells are independent; each draws its offset from its own substream, so
  // any execution order produces the same numbers.
  std::atomic<std::size_t> next{0};
  std::mutex failure_lock;
  std::exception_ptr failure;
  const auto worker = [&] {
    for (;;) {
      const std::size_t cell = next.fetch_add(1);
      if (cell >= n_cell) return;
      const std::size_t w_idx = cell / n_real;
      const std::size_t i = cell % n_real;
      try {
        const double bandwidth = config.bandwidths[w_idx];
        rng::Stream offsets = config.fixed_eps
                                  ? rng::Stream(config.master_seed, {kOffsetKey, i})
                                  : rng::Stream(config.master_seed, {kOffsetKey, i, w_idx});
        const double eps = offsets.uniform01() / (bandwidth * config.phases);
        cells[cell] = phase_penalty(responses[i].response, bandwidth, eps, config.phases);
      } catch (...) {
        const std::lock_guard<std::mutex> hold(failure_lock);
        if (!failure) failure = std::current_exception();
        next.store(n_cell);  // stop all workers
        return;
      }
    }
  };

  if (config.threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(config.threads));
    for (int t = 0; t < config.threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  report.records.reserve(n_cell);
  for (std::size_t w_idx = 0; w_idx < n_band; ++w_idx) {
    const double bandwidth = config.bandwidths[w_idx];
    const long taps = static_cast<long>(tap_count(report.delay_spread, bandwidth));
    BandwidthSummary row;
    row.bandwidth = bandwidth;
    row.taps = taps;
    double sum = 0;
    for (std::size_t i = 0; i < n_real; ++i) {
      const auto& cell = cells[w_idx * n_real + i];
      SweepRecord record;
      record.bandwidth = bandwidth;
      record.taps = taps;
      record.realization = static_cast<int>(i);
      record.eps = cell.eps;
      record.gains = cell.gains;
      record.penalty = cell.penalty;
      report.records.push_back(std::move(record));
      row.worst_penalty = std::max(row.worst_penalty, cell.penalty);
      sum += cell.penalty;
    }
    row.mean_penalty = sum / static_cast<double>(n_real);
    report.rows.push_back(row);
  }
  return report;
}

void emit_report(const PenaltyReport& report, const std::string& path) {
  if (!path.empty()) {
    std::string aggregate = "bandwidth_hz,L,P_max,P_mean\n";
    for (const auto& row : report.rows) {
      format_double(aggregate, row.bandwidth);
      aggregate += ',';
      aggregate += std::to_string(row.taps);
      aggregate += ',';
      format_double(aggregate, row.worst_penalty);
      aggregate += ',';
      format_double(aggregate, row.mean_penalty);
      aggregate += '\n';
    }
    write_text(path, aggregate);

    std::string detail = "bandwidth_hz,L,realization,eps_s";
    for (int m = 0; m < report.phases; ++m) detail += ",g_m" + std::to_string(m);
    detail += ",penalty\n";
    for (const auto& record : report.records) {
      format_double(detail, record.bandwidth);
      detail += ',';
      detail += std::to_string(record.taps);
      detail += ',';
      detail += std::to_string(record.realization);
      detail += ',';
      format_double(detail, record.eps);
      for (const double gain : record.gains) {
        detail += ',';
        format_double(detail, gain);
      }
      detail += ',';
      format_double(detail, record.penalty);
      detail += '\n';
    }
    write_text(detail_path_for(path), detail);
  }

  std::printf("%10s %10s %12s %6s\n", "W [MHz]", "P_T [%]", "avg P [%]", "L");
  for (const auto& row : report.rows)
    std::printf("%10.6g %10.1f %12.1f %6ld\n", row.bandwidth / 1e6, 100 * row.worst_penalty,
                100 * row.mean_penalty, row.taps);
}

std::vector<double> parse_bandwidth_ladder(const std::string& text) {
  if (text.empty()) throw ConfigError("empty bandwidth list");
  std::vector<double> bandwidths;
  const auto range = text.find("..");
  if (range != std::string::npos) {
    const double first = parse_number(text, 0, range);
    const auto factor_mark = text.find('x', range + 2);
    const double last = parse_number(
        text, range + 2, factor_mark == std::string::npos ? text.size() : factor_mark);
    const double factor =
        factor_mark == std::string::npos ? 2.0 : parse_number(text, factor_mark + 1, text.size());
    if (factor <= 1) throw ConfigError("ladder factor must exceed 1");
    if (last < first) throw ConfigError("ladder end below its start");
    for (double w = first; w <= last * (1 + 1e-9); w *= factor)
      bandwidths.push_back(w);
    return bandwidths;
  }
  std::size_t begin = 0;
  while (begin <= text.size()) {
    auto comma = text.find(',', begin);
    if (comma == std::string::npos) comma = text.size();
    bandwidths.push_back(parse_number(text, begin, comma));
    begin = comma + 1;
  }
  for (std::size_t k = 1; k < bandwidths.size(); ++k)
    if (!(bandwidths[k] > bandwidths[k - 1]))
      throw ConfigError("bandwidth list must be strictly ascending");
  return bandwidths;
}

}  // namespace uwbcap
