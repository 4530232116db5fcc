#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "uwbcap/errors.hpp"
#include "uwbcap/fourier.hpp"
#include "uwbcap/signal.hpp"

// Brute-force reference implementations, kept deliberately definition-shaped
// (quadratic sums, explicit phasors) and independent of the fast spectral
// paths they are used to check.
namespace uwbcap::reference {

inline constexpr Eigen::Index kSizeGuard = 4096;

template <typename Scalar>
void guard_size(Eigen::Index n, const char* what) {
  if (n > kSizeGuard)
    throw SizeGuardExceeded(std::string(what) + ": length " + std::to_string(n) +
                            " exceeds brute-force guard " + std::to_string(kSizeGuard));
}

/// Definition-level linear convolution, O(n^2).
template <typename Scalar>
DenseSignal<Scalar> direct_convolve(const DenseSignal<Scalar>& h, const DenseSignal<Scalar>& s) {
  validate(h);
  validate(s);
  guard_size<Scalar>(h.size(), "direct_convolve");
  guard_size<Scalar>(s.size(), "direct_convolve");
  const Scalar dt = h.grid_step;
  if (std::abs(dt - s.grid_step) > Scalar(1e-12) * std::max(dt, s.grid_step))
    throw GridMismatch("convolution operands use different grid steps");

  DenseSignal<Scalar> out;
  out.samples.setZero(h.size() + s.size() - 1);
  out.grid_step = dt;
  out.t0 = h.t0 + s.t0;
  for (Eigen::Index i = 0; i < h.size(); ++i)
    for (Eigen::Index j = 0; j < s.size(); ++j) out.samples[i + j] += h.samples[i] * s.samples[j];
  out.samples *= dt;
  return out;
}

/// Definition-level transform, O(n^2): one explicit phasor per (bin, sample).
/// Matches dft()'s bin layout, scaling, and absolute-time phase convention.
template <typename Scalar>
Spectrum<Scalar> direct_dft(const DenseSignal<Scalar>& x) {
  validate(x);
  guard_size<Scalar>(x.size(), "direct_dft");
  const Eigen::Index n = x.size();
  const Scalar df = Scalar(1) / (static_cast<Scalar>(n) * x.grid_step);

  Spectrum<Scalar> spec;
  spec.bins.resize(n);
  spec.freq_step = df;
  spec.f0 = -static_cast<Scalar>(n / 2) * df;
  spec.origin_time = x.t0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar f = spec.freq_at(i);
    std::complex<Scalar> acc{};
    for (Eigen::Index m = 0; m < n; ++m) {
      const double cycles = -static_cast<double>(f) * static_cast<double>(x.time_at(m));
      const double angle =
          2.0 * std::numbers::pi * std::remainder(cycles, 1.0);
      acc += x.samples[m] * std::complex<Scalar>(static_cast<Scalar>(std::cos(angle)),
                                                 static_cast<Scalar>(std::sin(angle)));
    }
    spec.bins[i] = acc * x.grid_step;
  }
  return spec;
}

template <typename Scalar>
Scalar sinc(Scalar u) {
  if (u == Scalar(0)) return Scalar(1);
  const Scalar a = std::numbers::pi_v<Scalar> * u;
  return std::sin(a) / a;
}

/// Shannon interpolation sum over the signal's stored extent (that extent is
/// the documented truncation: terms outside the grid are dropped).
template <typename Scalar>
std::complex<Scalar> sinc_interpolate(const DenseSignal<Scalar>& x, Scalar t) {
  validate(x);
  std::complex<Scalar> acc{};
  for (Eigen::Index n = 0; n < x.size(); ++n)
    acc += x.samples[n] * sinc<Scalar>((t - x.time_at(n)) / x.grid_step);
  return acc;
}

/// Trapezoid-rule integral of |x|^2 on the signal's own grid; bounds how far
/// the left-Riemann energy() convention sits from the smooth integral.
template <typename Scalar>
Scalar trapezoid_energy(const DenseSignal<Scalar>& x) {
  validate(x);
  Scalar acc{};
  for (Eigen::Index n = 0; n + 1 < x.size(); ++n)
    acc += (std::norm(x.samples[n]) + std::norm(x.samples[n + 1])) / Scalar(2);
  return x.grid_step * acc;
}

/// Relative Plancherel gap |E_time - E_freq| / E_time for the fast transform.
template <typename Scalar>
Scalar plancherel_check(const DenseSignal<Scalar>& x) {
  const Scalar e_time = energy(x);
  if (e_time == Scalar(0)) throw ZeroEnergyInput("plancherel check on zero-energy signal");
  const Scalar e_freq = energy(dft(x));
  return std::abs(e_time - e_freq) / e_time;
}

/// One convergence ladder: parameter values (strictly decreasing), the
/// discrepancy at each rung, and the decay order fitted in log-log space.
template <typename Scalar>
struct ConvergenceTrace {
  std::vector<Scalar> ladder;
  std::vector<Scalar> discrepancy;
  Scalar fitted_order{};
};

/// Least-squares slope of log(discrepancy) against log(ladder); a slope of p
/// means the discrepancy decays like ladder^p as the ladder shrinks. Needs at
/// least four rungs with positive discrepancy.
template <typename Scalar>
Scalar fit_decay_order(const std::vector<Scalar>& ladder, const std::vector<Scalar>& discrepancy) {
  if (ladder.size() != discrepancy.size()) throw Error("trace arrays differ in length");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] > Scalar(0) && discrepancy[i] > Scalar(0)) {
      lx.push_back(std::log(static_cast<double>(ladder[i])));
      ly.push_back(std::log(static_cast<double>(discrepancy[i])));
    }
  }
  if (lx.size() < 4) throw ConfigError("decay-order fit needs at least 4 usable ladder rungs");
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  return static_cast<Scalar>(sxy / sxx);
}

namespace detail {

/// Fitted order for a trace, or NaN when the trace is too degenerate to fit
/// (fewer than four rungs with positive discrepancy — e.g. an exactly-zero
/// trace, which is a success case, not an error).
template <typename Scalar>
Scalar fit_order_or_nan(const std::vector<Scalar>& ladder, const std::vector<Scalar>& discrepancy) {
  std::size_t usable = 0;
  for (std::size_t i = 0; i < ladder.size() && i < discrepancy.size(); ++i)
    if (ladder[i] > Scalar(0) && discrepancy[i] > Scalar(0)) ++usable;
  if (usable < 4) return std::numeric_limits<Scalar>::quiet_NaN();
  return fit_decay_order(ladder, discrepancy);
}

/// Shared integration window for the proof-chain quantities: grid samples in
/// [0, Ds), widened on the left by half a step so the sample at t=0 is safely
/// inside.  Half-open on the right, the window's sample count times the grid
/// step equals L'*T' whenever T' divides Ds — which is what makes the exact
/// Riemann-sum cases land on zero discrepancy — and it covers the full energy
/// of any response whose support stays strictly below Ds.
template <typename Scalar>
Scalar window_end(const ImpulseResponse<Scalar>& h) {
  return h.delay_spread;
}

template <typename Scalar>
Scalar window_end(const EffectiveResponse<Scalar>& h) {
  return h.source_delay_spread;
}

template <typename Scalar>
Scalar window_start(Scalar grid_step) {
  return -grid_step / Scalar(2);
}

/// Left-Riemann sum T' * sum |hT(l*T' - delta)|^2 over l = 0..floor(Ds/T')-1.
template <typename Scalar>
Scalar riemann_tap_sum(const EffectiveResponse<Scalar>& ht, Scalar delta, Scalar tprime) {
  const auto count =
      static_cast<Eigen::Index>(std::floor(static_cast<double>(ht.source_delay_spread / tprime)));
  std::vector<Scalar> times(static_cast<std::size_t>(std::max<Eigen::Index>(count, 0)));
  for (Eigen::Index l = 0; l < count; ++l)
    times[static_cast<std::size_t>(l)] = static_cast<Scalar>(l) * tprime - delta;
  if (times.empty()) return Scalar(0);
  const auto values = sample_at(ht.signal, times);
  return tprime * values.squaredNorm();
}

}  // namespace detail

/// First proof-chain approximation: the energy lost to the lowpass,
/// energy(h) - energy(lowpass(h, W)), per bandwidth.  Every rung is filtered
/// on one shared padded grid, so the passbands nest and the deficit is
/// nonincreasing in W by construction, not merely statistically.
template <typename Scalar>
ConvergenceTrace<Scalar> approximation1_trace(const ImpulseResponse<Scalar>& h,
                                              std::vector<Scalar> bandwidths) {
  std::sort(bandwidths.begin(), bandwidths.end());
  if (bandwidths.empty()) throw ConfigError("bandwidth ladder is empty");

  // Shared grid: pad for the widest period, length a multiple of every stride.
  const Scalar dt = h.signal.grid_step;
  const Scalar w_min = bandwidths.front();
  Eigen::Index stride_lcm = 1;
  bool commensurate = true;
  for (Scalar w : bandwidths) {
    const double stride_real = 1.0 / (static_cast<double>(w) * static_cast<double>(dt));
    const auto stride = static_cast<Eigen::Index>(std::llround(stride_real));
    if (stride < 1 || std::abs(stride_real - static_cast<double>(stride)) > 1e-6 * stride_real) {
      commensurate = false;
      break;
    }
    stride_lcm = std::lcm(stride_lcm, stride);
    if (stride_lcm > (Eigen::Index(1) << 22)) {
      commensurate = false;
      break;
    }
  }

  constexpr Eigen::Index kSlack = 64;
  const auto samples_for = [dt](Scalar duration) {
    return static_cast<Eigen::Index>(std::ceil(static_cast<double>(duration / dt)));
  };
  const Eigen::Index pad_left = samples_for(h.delay_spread + Scalar(1) / w_min) + kSlack;
  Eigen::Index total = pad_left + h.signal.size() + samples_for(h.delay_spread) + kSlack;
  total = commensurate ? uwbcap::detail::next_fast_multiple(total, stride_lcm)
                       : uwbcap::detail::next_fast_len(total);

  DenseSignal<Scalar> padded;
  padded.samples.setZero(total);
  padded.samples.segment(pad_left, h.signal.size()) = h.signal.samples;
  padded.grid_step = dt;
  padded.t0 = h.signal.t0 - static_cast<Scalar>(pad_left) * dt;

  const Scalar base = energy(h.signal);

  ConvergenceTrace<Scalar> trace;
  for (auto it = bandwidths.rbegin(); it != bandwidths.rend(); ++it) {
    const Scalar w = *it;
    const DenseSignal<Scalar> filtered = bandlimit(padded, w);
    trace.ladder.push_back(Scalar(1) / w);  // rung parameter T, increasing here
    trace.discrepancy.push_back(std::abs(base - energy(filtered)));
  }
  std::reverse(trace.ladder.begin(), trace.ladder.end());  // strictly decreasing T
  std::reverse(trace.discrepancy.begin(), trace.discrepancy.end());
  trace.fitted_order = detail::fit_order_or_nan(trace.ladder, trace.discrepancy);
  return trace;
}

/// Second approximation: windowed-energy change under a sub-sample shift,
/// per delta on a strictly decreasing ladder.
template <typename Scalar>
ConvergenceTrace<Scalar> approximation2_trace(const EffectiveResponse<Scalar>& ht,
                                              std::vector<Scalar> deltas) {
  std::sort(deltas.begin(), deltas.end(), std::greater<>());
  if (deltas.empty()) throw ConfigError("delta ladder is empty");
  const Scalar lo = detail::window_start(ht.signal.grid_step);
  const Scalar hi = detail::window_end(ht);
  const Scalar base = windowed_energy(ht.signal, lo, hi);

  ConvergenceTrace<Scalar> trace;
  for (Scalar delta : deltas) {
    const DenseSignal<Scalar> shifted = fractional_shift(ht.signal, delta);
    trace.ladder.push_back(delta);
    trace.discrepancy.push_back(std::abs(base - windowed_energy(shifted, lo, hi)));
  }
  trace.fitted_order = detail::fit_order_or_nan(trace.ladder, trace.discrepancy);
  return trace;
}

/// Third approximation: windowed energy of the shifted response versus its
/// left-Riemann tap sum at spacing T', per T' on a decreasing ladder.
template <typename Scalar>
ConvergenceTrace<Scalar> approximation3_trace(const EffectiveResponse<Scalar>& ht, Scalar delta,
                                              std::vector<Scalar> tprimes) {
  std::sort(tprimes.begin(), tprimes.end(), std::greater<>());
  if (tprimes.empty()) throw ConfigError("T' ladder is empty");
  const Scalar lo = detail::window_start(ht.signal.grid_step);
  const Scalar hi = detail::window_end(ht);
  const DenseSignal<Scalar> shifted = fractional_shift(ht.signal, delta);
  const Scalar base = windowed_energy(shifted, lo, hi);

  ConvergenceTrace<Scalar> trace;
  for (Scalar tprime : tprimes) {
    trace.ladder.push_back(tprime);
    trace.discrepancy.push_back(std::abs(base - detail::riemann_tap_sum(ht, delta, tprime)));
  }
  trace.fitted_order = detail::fit_order_or_nan(trace.ladder, trace.discrepancy);
  return trace;
}

/// All three proof-chain terms at one (W, delta) operating point, plus the
/// end-to-end gap they bound: every shared quantity is computed once, so
/// gap <= e1 + e2 + e3 is a triangle inequality, not an approximation.
template <typename Scalar>
struct CombinationCheck {
  Scalar gap{};  // |energy(h) - Riemann tap sum|
  Scalar e1{}, e2{}, e3{};
  Scalar bound_slack() const { return gap - (e1 + e2 + e3); }
};

template <typename Scalar>
CombinationCheck<Scalar> combination_check(const ImpulseResponse<Scalar>& h, Scalar bandwidth,
                                           Scalar delta) {
  const EffectiveResponse<Scalar> ht = ideal_lowpass(h, bandwidth);
  const Scalar lo = detail::window_start(ht.signal.grid_step);
  const Scalar hi = detail::window_end(ht);

  const Scalar wh = windowed_energy(h.signal, lo, hi);
  const Scalar wt = windowed_energy(ht.signal, lo, hi);
  const DenseSignal<Scalar> shifted = fractional_shift(ht.signal, delta);
  const Scalar ws = windowed_energy(shifted, lo, hi);
  const Scalar taps = detail::riemann_tap_sum(ht, delta, ht.sample_time);

  CombinationCheck<Scalar> out;
  out.e1 = std::abs(wh - wt);
  out.e2 = std::abs(wt - ws);
  out.e3 = std::abs(ws - taps);
  out.gap = std::abs(wh - taps);
  return out;
}

}  // namespace uwbcap::reference
