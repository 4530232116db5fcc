#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <string>

#include "uwbcap/errors.hpp"

namespace uwbcap {

/// Uniformly sampled complex signal: samples[n] is the value at t0 + n*grid_step.
/// The grid is the "continuous time" stand-in; every physical quantity is
/// integrated with step weight grid_step.
template <typename Scalar>
struct DenseSignal {
  using Complex = std::complex<Scalar>;
  using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  Vector samples;
  Scalar grid_step{};  // seconds per sample, > 0
  Scalar t0{};         // time of samples[0], seconds

  Eigen::Index size() const { return samples.size(); }
  Scalar time_at(Eigen::Index n) const { return t0 + static_cast<Scalar>(n) * grid_step; }
  Scalar end_time() const { return time_at(size() - 1); }
};

using DenseSignald = DenseSignal<double>;

/// Sampled continuous-time Fourier transform of a DenseSignal.
/// bins[i] approximates F{x}(f0 + i*freq_step) including the phase of the
/// signal's absolute time origin; origin_time is kept so the inverse is exact.
template <typename Scalar>
struct Spectrum {
  using Complex = std::complex<Scalar>;
  using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  Vector bins;         // ascending frequency order
  Scalar freq_step{};  // Hz per bin
  Scalar f0{};         // frequency of bins[0], Hz
  Scalar origin_time{};

  Eigen::Index size() const { return bins.size(); }
  Scalar freq_at(Eigen::Index i) const { return f0 + static_cast<Scalar>(i) * freq_step; }
};

using Spectrumd = Spectrum<double>;

/// Physical multipath response: finite support inside [0, delay_spread].
template <typename Scalar>
struct ImpulseResponse {
  DenseSignal<Scalar> signal;
  Scalar delay_spread{};  // seconds
};

using ImpulseResponsed = ImpulseResponse<double>;

/// Response seen through an ideal unit-gain lowpass of two-sided width
/// `bandwidth`; support is no longer finite, so the signal keeps the padded
/// grid it was filtered on. source_delay_spread records the spread of the
/// response it came from (it fixes the tap count downstream).
template <typename Scalar>
struct EffectiveResponse {
  DenseSignal<Scalar> signal;
  Scalar bandwidth{};    // W, Hz
  Scalar sample_time{};  // T = 1/W, seconds
  Scalar source_delay_spread{};
};

using EffectiveResponsed = EffectiveResponse<double>;

/// Energy of the signal as a left-Riemann integral of |x|^2.
template <typename Scalar>
Scalar energy(const DenseSignal<Scalar>& x) {
  return x.grid_step * x.samples.squaredNorm();
}

/// Energy over the half-open time window [a, b), same Riemann convention.
template <typename Scalar>
Scalar windowed_energy(const DenseSignal<Scalar>& x, Scalar a, Scalar b) {
  // Snap window ends to the grid so a boundary exactly on a sample is stable.
  const Scalar tol = x.grid_step * Scalar(1e-6);
  Eigen::Index lo = static_cast<Eigen::Index>(std::ceil((a - x.t0 - tol) / x.grid_step));
  Eigen::Index hi = static_cast<Eigen::Index>(std::ceil((b - x.t0 - tol) / x.grid_step));
  lo = std::max<Eigen::Index>(lo, 0);
  hi = std::min<Eigen::Index>(hi, x.size());
  if (hi <= lo) return Scalar(0);
  return x.grid_step * x.samples.segment(lo, hi - lo).squaredNorm();
}

/// Frequency-domain energy with the matching Riemann convention; equals
/// energy() of the originating signal up to roundoff (Plancherel).
template <typename Scalar>
Scalar energy(const Spectrum<Scalar>& s) {
  return s.freq_step * s.bins.squaredNorm();
}

template <typename Scalar>
void validate(const DenseSignal<Scalar>& x) {
  if (x.size() == 0) throw Error("signal has no samples");
  if (!(x.grid_step > Scalar(0))) throw Error("signal grid step must be positive");
  if (!x.samples.allFinite()) throw Error("signal contains non-finite samples");
  if (!std::isfinite(static_cast<double>(x.t0))) throw Error("signal origin is not finite");
}

/// Checked constructor: the amplitude must vanish exactly outside [0, delay_spread].
template <typename Scalar>
ImpulseResponse<Scalar> make_impulse_response(DenseSignal<Scalar> signal, Scalar delay_spread) {
  validate(signal);
  if (!(delay_spread > Scalar(0))) throw Error("delay spread must be positive");
  const Scalar tol = signal.grid_step * Scalar(1e-9);
  for (Eigen::Index n = 0; n < signal.size(); ++n) {
    const Scalar t = signal.time_at(n);
    if ((t < -tol || t > delay_spread + tol) && signal.samples[n] != typename DenseSignal<Scalar>::Complex{}) {
      throw Error("impulse response has amplitude outside [0, delay spread] at t=" +
                  std::to_string(static_cast<double>(t)));
    }
  }
  return ImpulseResponse<Scalar>{std::move(signal), delay_spread};
}

}  // namespace uwbcap
