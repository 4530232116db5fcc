#include "uwbcap/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "uwbcap/candidates.hpp"
#include "uwbcap/cluster_model.hpp"
#include "uwbcap/fourier.hpp"
#include "uwbcap/reference.hpp"
#include "uwbcap/rng.hpp"
#include "uwbcap/signal.hpp"

namespace uwbcap {

namespace {

constexpr std::uint64_t kBatteryKey = 0x7665722d62617474;  // substream tag: battery draws

// Substream lanes so every randomized check draws independently of the others.
enum Lane : std::uint64_t {
  kLaneConvolve = 1,
  kLaneDft = 2,
  kLaneSample = 3,
  kLanePlancherel = 4,
  kLaneCombination = 5,
};

double max_rel_error(const Eigen::VectorXcd& got, const Eigen::VectorXcd& want) {
  const double scale = want.cwiseAbs().maxCoeff();
  return (got - want).cwiseAbs().maxCoeff() / scale;
}

DenseSignald random_signal(rng::Stream& stream, Eigen::Index lo, Eigen::Index hi) {
  DenseSignald x;
  const auto n = lo + static_cast<Eigen::Index>(stream.next_u64() %
                                                static_cast<std::uint64_t>(hi - lo + 1));
  x.samples.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) x.samples[k] = stream.complex_normal();
  x.grid_step = 0.5 + 1.5 * stream.uniform01();
  x.t0 = 2.0 * stream.uniform01() - 1.0;
  return x;
}

/// Smooth, well-localized test signal: a few Gaussian-envelope pulses in the
/// middle third of the grid.  Its bandlimited interpolant decays so fast that
/// the periodic fast path and the truncated-series reference both evaluate it
/// essentially exactly, which is what makes them comparable at tight tolerance.
DenseSignald pulse_signal(rng::Stream& stream, Eigen::Index n) {
  DenseSignald x;
  x.samples.setZero(n);
  x.grid_step = 0.5 + 1.5 * stream.uniform01();
  x.t0 = 2.0 * stream.uniform01() - 1.0;
  const int pulses = 3;
  for (int p = 0; p < pulses; ++p) {
    const double center =
        (static_cast<double>(n) / 3.0) * (1.0 + stream.uniform01());  // middle third, in samples
    const double sigma = 3.0 + 3.0 * stream.uniform01();              // samples
    const auto amp = stream.complex_normal();
    for (Eigen::Index k = 0; k < n; ++k) {
      const double u = (static_cast<double>(k) - center) / sigma;
      if (std::abs(u) < 10.0) x.samples[k] += amp * std::exp(-0.5 * u * u);
    }
  }
  return x;
}

double max_rung_increase(const std::vector<double>& discrepancy) {
  double worst = 0.0;
  for (std::size_t j = 1; j < discrepancy.size(); ++j)
    worst = std::max(worst, discrepancy[j] - discrepancy[j - 1]);
  return worst;
}

std::vector<double> halving_ladder(double first, int rungs) {
  std::vector<double> ladder(static_cast<std::size_t>(rungs));
  for (int j = 0; j < rungs; ++j) ladder[static_cast<std::size_t>(j)] = first / double(1 << j);
  return ladder;
}

CheckRow below(std::string check, std::string metric, double value, double limit) {
  return CheckRow{std::move(check), std::move(metric), value, limit, value <= limit};
}

CheckRow above(std::string check, std::string metric, double value, double limit) {
  return CheckRow{std::move(check), std::move(metric), value, limit, value >= limit};
}

}  // namespace

std::vector<CheckRow> run_verification(const VerificationOptions& options) {
  std::vector<CheckRow> rows;
  const int instances = std::max(options.instances, 1);

  {  // fast convolution against the definition-level double loop
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
      rng::Stream stream(options.seed, {kBatteryKey, kLaneConvolve, std::uint64_t(i)});
      DenseSignald h = random_signal(stream, 8, 96);
      DenseSignald s = random_signal(stream, 8, 96);
      s.grid_step = h.grid_step;
      const auto want = reference::direct_convolve(h, s);
      const auto got = convolve(h, s);
      worst = std::max(worst, max_rel_error(got.samples, want.samples));
    }
    rows.push_back(below("convolve_vs_direct", "max relative error (pass <= limit)", worst, 1e-9));
  }

  {  // fast transform against the definition-level summation
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
      rng::Stream stream(options.seed, {kBatteryKey, kLaneDft, std::uint64_t(i)});
      const DenseSignald x = random_signal(stream, 8, 128);
      const auto want = reference::direct_dft(x);
      const auto got = dft(x);
      worst = std::max(worst, max_rel_error(got.bins, want.bins));
    }
    rows.push_back(below("dft_vs_direct", "max relative bin error (pass <= limit)", worst, 1e-10));
  }

  {  // off-grid evaluation against the truncated interpolation series
    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
      rng::Stream stream(options.seed, {kBatteryKey, kLaneSample, std::uint64_t(i)});
      const DenseSignald x = pulse_signal(stream, 512);
      const double scale = x.samples.cwiseAbs().maxCoeff();
      for (int k = 0; k < 10; ++k) {
        const double span = static_cast<double>(x.size()) / 3.0;
        const double t = x.t0 + (span + stream.uniform01() * span) * x.grid_step;
        const auto got = sample_at(x, t);
        const auto want = reference::sinc_interpolate(x, t);
        worst = std::max(worst, std::abs(got - want) / scale);
      }
    }
    rows.push_back(
        below("sample_at_vs_sinc", "max relative error (pass <= limit)", worst, 1e-7));
  }

  // Responses for the energy and proof-chain checks.  The finer grid carries
  // the 4..1024 MHz ladder; the coarser one carries the 256 MHz checks.
  ClusterModelParams fine_params;
  fine_params.seed = options.seed;
  fine_params.grid_step = 1.0 / (16.0 * 1024e6);
  const ImpulseResponsed fine_cir = std::move(generate_cirs(fine_params, 1)[0].response);

  ClusterModelParams mid_params;
  mid_params.seed = options.seed;
  mid_params.grid_step = 1.0 / (16.0 * 256e6);
  const int cir_count = std::max(options.combination_cirs, 1);
  auto mid_cirs = generate_cirs(mid_params, static_cast<std::size_t>(cir_count));

  {  // time/frequency energy agreement on the documented signal battery
    double worst = 0.0;
    DenseSignald rect;
    rect.samples.setZero(256);
    rect.samples.head(64).setConstant(0.75);
    rect.grid_step = 1e-3;
    rect.t0 = 0.0;
    worst = std::max(worst, reference::plancherel_check(rect));

    DenseSignald pulse;
    pulse.samples.resize(1024);
    pulse.grid_step = 0.01;
    pulse.t0 = 0.0;
    for (Eigen::Index k = 0; k < pulse.size(); ++k)
      pulse.samples[k] = reference::sinc(20.0 * (pulse.time_at(k) - 5.12));
    worst = std::max(worst, reference::plancherel_check(pulse));

    worst = std::max(worst, reference::plancherel_check(mid_cirs.front().response.signal));
    for (int i = 0; i < 20; ++i) {
      rng::Stream stream(options.seed, {kBatteryKey, kLanePlancherel, std::uint64_t(i)});
      worst = std::max(worst, reference::plancherel_check(random_signal(stream, 16, 256)));
    }
    rows.push_back(
        below("plancherel", "max relative energy gap (pass <= limit)", worst, 1e-6));
  }

  {  // first approximation: lowpass energy deficit over the bandwidth ladder
    std::vector<double> ladder;
    for (double w = 4e6; w <= 1024e6 * (1 + 1e-9); w *= 2) ladder.push_back(w);
    const auto trace = reference::approximation1_trace(fine_cir, ladder);
    rows.push_back(below("approx1_nonincreasing", "max rung-to-rung increase (pass <= limit)",
                         max_rung_increase(trace.discrepancy), 1e-12));
  }

  {  // second approximation: energy shift continuity at 256 MHz
    const auto ht = ideal_lowpass(mid_cirs.front().response, 256e6);
    const auto trace =
        reference::approximation2_trace(ht, halving_ladder(ht.sample_time / 2.0, 8));
    rows.push_back(below("approx2_nonincreasing", "max rung-to-rung increase (pass <= limit)",
                         max_rung_increase(trace.discrepancy), 1e-9));
  }

  {  // third approximation: Riemann tap sum at shrinking spacing, 64 MHz.
    // The ladder stops four grid steps above the dense-grid resolution:
    // below that the sum and the gridded energy integral coincide up to
    // grid-level noise and the decay law no longer applies.
    const auto ht = ideal_lowpass(fine_cir, 64e6);
    const double delta = 0.3 * ht.sample_time;
    const auto trace = reference::approximation3_trace(
        ht, delta, halving_ladder(ht.sample_time / 2.0, 6));
    rows.push_back(below("approx3_nonincreasing", "max rung-to-rung increase (pass <= limit)",
                         max_rung_increase(trace.discrepancy), 1e-9));
    rows.push_back(above("approx3_order", "fitted decay order (pass >= limit)",
                         trace.fitted_order, 1.0));
    double ratio_min = std::numeric_limits<double>::infinity();
    double ratio_max = 0.0;
    for (std::size_t j = 1; j < trace.discrepancy.size(); ++j) {
      if (trace.discrepancy[j] <= 0.0) continue;
      const double ratio = trace.discrepancy[j - 1] / trace.discrepancy[j];
      ratio_min = std::min(ratio_min, ratio);
      ratio_max = std::max(ratio_max, ratio);
    }
    rows.push_back(above("approx3_ratio_min", "min halving ratio (pass >= limit)", ratio_min, 1.5));
    rows.push_back(below("approx3_ratio_max", "max halving ratio (pass <= limit)", ratio_max, 4.0));
  }

  {  // combined bound: |energy(h) - acquired gain| against the three terms
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < cir_count; ++i) {
      const auto& h = mid_cirs[static_cast<std::size_t>(i)].response;
      const double bandwidth = 256e6;
      rng::Stream stream(options.seed, {kBatteryKey, kLaneCombination, std::uint64_t(i)});
      const double delta = stream.uniform01() / bandwidth;
      const auto terms = reference::combination_check(h, bandwidth, delta);
      const auto ht = ideal_lowpass(h, bandwidth);
      const double gain = extract_candidate(ht, delta, 0).gain;
      const double gap = std::abs(energy(h.signal) - gain);
      worst = std::max(worst, gap - (terms.e1 + terms.e2 + terms.e3));
    }
    rows.push_back(below("combination_bound", "max bound violation (pass <= limit)", worst, 1e-8));
  }

  return rows;
}

bool all_pass(const std::vector<CheckRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

void print_check_table(const std::vector<CheckRow>& rows) {
  std::printf("%-24s %-42s %13s %13s  %s\n", "check", "metric", "value", "limit", "result");
  int passed = 0;
  for (const CheckRow& row : rows) {
    std::printf("%-24s %-42s %13.5g %13.5g  %s\n", row.check.c_str(), row.metric.c_str(),
                row.value, row.limit, row.pass ? "PASS" : "FAIL");
    passed += row.pass ? 1 : 0;
  }
  std::printf("%d/%zu checks passed\n", passed, rows.size());
}

void write_check_csv(const std::vector<CheckRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  std::string text = "check,metric,value,limit,pass\n";
  char buf[40];
  for (const CheckRow& row : rows) {
    text += row.check;
    text += ",\"";
    text += row.metric;
    text += "\",";
    std::snprintf(buf, sizeof buf, "%.17g", row.value);
    text += buf;
    text += ',';
    std::snprintf(buf, sizeof buf, "%.17g", row.limit);
    text += buf;
    text += ',';
    text += row.pass ? '1' : '0';
    text += '\n';
  }
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace uwbcap
