#pragma once

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "uwbcap/errors.hpp"
#include "uwbcap/signal.hpp"

namespace uwbcap {

namespace detail {

/// Smallest n' >= n whose prime factors are all in {2, 3, 5} (fast FFT sizes).
inline Eigen::Index next_fast_len(Eigen::Index n) {
  if (n <= 1) return 1;
  for (Eigen::Index candidate = n;; ++candidate) {
    Eigen::Index m = candidate;
    for (int p : {2, 3, 5})
      while (m % p == 0) m /= p;
    if (m == 1) return candidate;
  }
}

inline bool is_fast_len(Eigen::Index n) { return n >= 1 && next_fast_len(n) == n; }

/// Smallest fast length that is >= n and a multiple of r. Falls back to a
/// plain multiple when r itself has prime factors outside {2, 3, 5}.
inline Eigen::Index next_fast_multiple(Eigen::Index n, Eigen::Index r) {
  if (r <= 1) return next_fast_len(n);
  Eigen::Index candidate = ((n + r - 1) / r) * r;
  if (!is_fast_len(r)) return candidate;
  while (!is_fast_len(candidate)) candidate += r;
  return candidate;
}

/// Smallest fast length >= n that is an ODD multiple of r. When a grid of
/// length m*r is lowpassed to the bandwidth whose sample period spans r grid
/// steps, the open passband holds m bins for odd m but only m-1 for even m;
/// with an odd count the interpolation kernel vanishes at every nonzero
/// multiple of the period, matching the real-line sinc, while an even count
/// leaves a unit-amplitude residue at all period-spaced taps.
inline Eigen::Index next_fast_odd_multiple(Eigen::Index n, Eigen::Index r) {
  if (r <= 1) return next_fast_len(n);
  Eigen::Index m = (n + r - 1) / r;
  if (m % 2 == 0) ++m;
  if (!is_fast_len(r)) return m * r;
  while (!is_fast_len(m * r)) m += 2;
  return m * r;
}

/// Signed frequency index of raw FFT bin k (length n): 0..n/2-ish positive,
/// the rest negative; for even n the shared bin maps to -n/2.
inline Eigen::Index signed_bin(Eigen::Index k, Eigen::Index n) {
  return k <= (n - 1) / 2 ? k : k - n;
}

template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> raw_fft(
    const Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>& x) {
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> out(x.size());
  Eigen::FFT<Scalar> fft;
  fft.fwd(out.data(), x.data(), x.size());
  return out;
}

template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> raw_ifft(
    const Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>& x) {
  Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> out(x.size());
  Eigen::FFT<Scalar> fft;
  fft.inv(out.data(), x.data(), x.size());  // includes the 1/n factor
  return out;
}

/// Unit phasor exp(+j*2*pi*cycles) with the argument reduced before the trig
/// call so that large frequency*time products keep full precision.
template <typename Scalar>
std::complex<Scalar> unit_phasor(Scalar cycles) {
  const Scalar reduced = static_cast<Scalar>(
      std::remainder(static_cast<double>(cycles), 1.0));
  const Scalar angle = Scalar(2) * std::numbers::pi_v<Scalar> * reduced;
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace detail

/// Forward transform. bins[i] approximates the continuous-time Fourier
/// transform at f0 + i*freq_step, absolute-time phase included, so Plancherel
/// holds with the Riemann weights used by energy().
template <typename Scalar>
Spectrum<Scalar> dft(const DenseSignal<Scalar>& x) {
  validate(x);
  const Eigen::Index n = x.size();
  const Scalar df = Scalar(1) / (static_cast<Scalar>(n) * x.grid_step);
  auto raw = detail::raw_fft<Scalar>(x.samples);

  Spectrum<Scalar> spec;
  spec.bins.resize(n);
  spec.freq_step = df;
  spec.f0 = -static_cast<Scalar>(n / 2) * df;
  spec.origin_time = x.t0;
  const Eigen::Index m = n / 2;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index k = (i + (n - m)) % n;  // raw bin holding frequency f0 + i*df
    std::complex<Scalar> v = raw[k] * x.grid_step;
    if (x.t0 != Scalar(0)) v *= detail::unit_phasor<Scalar>(-spec.freq_at(i) * x.t0);
    spec.bins[i] = v;
  }
  return spec;
}

/// Inverse of dft(): idft(dft(x)) reproduces x on the same grid.
template <typename Scalar>
DenseSignal<Scalar> idft(const Spectrum<Scalar>& spec) {
  const Eigen::Index n = spec.size();
  if (n == 0) throw Error("spectrum has no bins");
  if (!(spec.freq_step > Scalar(0))) throw Error("spectrum frequency step must be positive");
  const Scalar dt = Scalar(1) / (static_cast<Scalar>(n) * spec.freq_step);

  typename Spectrum<Scalar>::Vector raw(n);
  const Eigen::Index m = n / 2;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index k = (i + (n - m)) % n;
    std::complex<Scalar> v = spec.bins[i] / dt;
    if (spec.origin_time != Scalar(0))
      v *= detail::unit_phasor<Scalar>(spec.freq_at(i) * spec.origin_time);
    raw[k] = v;
  }
  DenseSignal<Scalar> x;
  x.samples = detail::raw_ifft<Scalar>(raw);
  x.grid_step = dt;
  x.t0 = spec.origin_time;
  return x;
}

/// Ideal unit-gain lowpass applied on the signal's own grid: bins strictly
/// inside (-W/2, W/2) pass untouched, all others are set exactly to zero.
/// Keeping the band open means no two passband bins sit a whole W apart,
/// which is what makes critical sampling of the result energy-exact.
template <typename Scalar>
DenseSignal<Scalar> bandlimit(const DenseSignal<Scalar>& x, Scalar bandwidth) {
  validate(x);
  if (!(bandwidth > Scalar(0))) throw Error("bandwidth must be positive");
  const Eigen::Index n = x.size();
  const Scalar df = Scalar(1) / (static_cast<Scalar>(n) * x.grid_step);
  const Scalar edge = bandwidth / Scalar(2) * (Scalar(1) - Scalar(1e-12));
  auto raw = detail::raw_fft<Scalar>(x.samples);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar f = static_cast<Scalar>(detail::signed_bin(k, n)) * df;
    if (!(std::abs(f) < edge)) raw[k] = std::complex<Scalar>{};
  }
  DenseSignal<Scalar> out = x;
  out.samples = detail::raw_ifft<Scalar>(raw);
  return out;
}

/// Lowpass a finite-support response to two-sided bandwidth W, returning it on
/// an enlarged grid: at least a delay spread plus one sample period of guard on
/// the left and a full delay spread on the right, so spill-over and later
/// sub-sample shifts stay clear of wrap-around. When 1/(W*grid_step) is an
/// integer the padded length is kept an ODD multiple of it, so sampling the
/// result at spacing T = 1/W hits grid points exactly and the filtered
/// response of a point source vanishes at every other tap of the comb, exactly
/// as the real-line sinc does. (An even multiple would keep one fewer
/// passband harmonic, and the resulting kernel leaks a unit residue onto
/// every T-spaced tap — at coarse bandwidths, where the padded grid is only a
/// few periods long, that residue flattens comb energies dramatically.)
template <typename Scalar>
EffectiveResponse<Scalar> ideal_lowpass(const ImpulseResponse<Scalar>& h, Scalar bandwidth) {
  validate(h.signal);
  if (!(bandwidth > Scalar(0))) throw Error("bandwidth must be positive");
  const Scalar dt = h.signal.grid_step;
  const Scalar nyquist = Scalar(1) / (Scalar(2) * dt);
  if (bandwidth > nyquist * (Scalar(1) + Scalar(1e-9)))
    throw BandwidthExceedsGrid("bandwidth " + std::to_string(static_cast<double>(bandwidth)) +
                               " Hz exceeds grid Nyquist " +
                               std::to_string(static_cast<double>(nyquist)) + " Hz");

  const Scalar period = Scalar(1) / bandwidth;
  const Scalar spread = h.delay_spread;
  constexpr Eigen::Index kSlack = 64;

  const auto samples_for = [dt](Scalar duration) {
    return static_cast<Eigen::Index>(std::ceil(static_cast<double>(duration / dt)));
  };
  const Eigen::Index pad_left = samples_for(spread + period) + kSlack;
  // target right edge beyond 2*spread measured from the response origin
  const Eigen::Index body = pad_left + h.signal.size();
  const Eigen::Index right_edge =
      static_cast<Eigen::Index>(std::ceil(static_cast<double>((Scalar(2) * spread - h.signal.t0) / dt))) +
      pad_left + kSlack;
  Eigen::Index total = std::max(body, right_edge);

  const double stride_real = static_cast<double>(period / dt);
  const Eigen::Index stride = static_cast<Eigen::Index>(std::llround(stride_real));
  const bool commensurate =
      stride >= 1 && std::abs(stride_real - static_cast<double>(stride)) <= 1e-6 * stride_real;
  total = commensurate ? detail::next_fast_odd_multiple(total, stride) : detail::next_fast_len(total);

  DenseSignal<Scalar> padded;
  padded.samples.setZero(total);
  padded.samples.segment(pad_left, h.signal.size()) = h.signal.samples;
  padded.grid_step = dt;
  padded.t0 = h.signal.t0 - static_cast<Scalar>(pad_left) * dt;

  EffectiveResponse<Scalar> out;
  out.signal = bandlimit(padded, bandwidth);
  out.bandwidth = bandwidth;
  out.sample_time = period;
  out.source_delay_spread = spread;
  return out;
}

/// Delay the signal by `shift` seconds (positive = later) via a spectral phase
/// ramp; exact for band-limited content, circular on the represented extent.
template <typename Scalar>
DenseSignal<Scalar> fractional_shift(const DenseSignal<Scalar>& x, Scalar shift) {
  validate(x);
  if (shift == Scalar(0)) return x;
  const Eigen::Index n = x.size();
  const Scalar df = Scalar(1) / (static_cast<Scalar>(n) * x.grid_step);
  auto raw = detail::raw_fft<Scalar>(x.samples);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Scalar f = static_cast<Scalar>(detail::signed_bin(k, n)) * df;
    raw[k] *= detail::unit_phasor<Scalar>(-f * shift);
  }
  DenseSignal<Scalar> out = x;
  out.samples = detail::raw_ifft<Scalar>(raw);
  return out;
}

/// Evaluate the band-limited interpolant of the spectrum at absolute time t.
template <typename Scalar>
std::complex<Scalar> synthesize(const Spectrum<Scalar>& spec, Scalar t) {
  const Eigen::Index n = spec.size();
  std::complex<Scalar> acc{};
  std::complex<Scalar> phase{};
  const std::complex<Scalar> step = detail::unit_phasor<Scalar>(spec.freq_step * t);
  constexpr Eigen::Index kResync = 256;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i % kResync == 0) phase = detail::unit_phasor<Scalar>(spec.freq_at(i) * t);
    acc += spec.bins[i] * phase;
    phase *= step;
  }
  return acc * spec.freq_step;
}

/// Values of the signal at arbitrary times inside its represented extent.
/// Times on the grid return the stored samples; off-grid times use the
/// spectral interpolant of the whole grid.
template <typename Scalar>
typename DenseSignal<Scalar>::Vector sample_at(const DenseSignal<Scalar>& x,
                                               const std::vector<Scalar>& times) {
  validate(x);
  const Scalar tol = x.grid_step * Scalar(1e-9);
  bool need_spectrum = false;
  for (Scalar t : times) {
    if (t < x.t0 - tol || t > x.end_time() + tol)
      throw TimeOutOfRange("time " + std::to_string(static_cast<double>(t)) +
                           " s outside represented extent [" +
                           std::to_string(static_cast<double>(x.t0)) + ", " +
                           std::to_string(static_cast<double>(x.end_time())) + "]");
    const Scalar pos = (t - x.t0) / x.grid_step;
    if (std::abs(pos - std::round(static_cast<double>(pos))) > Scalar(1e-9)) need_spectrum = true;
  }

  Spectrum<Scalar> spec;
  if (need_spectrum) spec = dft(x);

  typename DenseSignal<Scalar>::Vector out(static_cast<Eigen::Index>(times.size()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Scalar pos = (times[i] - x.t0) / x.grid_step;
    const auto nearest = static_cast<Eigen::Index>(std::llround(static_cast<double>(pos)));
    if (std::abs(pos - static_cast<Scalar>(nearest)) <= Scalar(1e-9) && nearest >= 0 &&
        nearest < x.size()) {
      out[static_cast<Eigen::Index>(i)] = x.samples[nearest];
    } else {
      out[static_cast<Eigen::Index>(i)] = synthesize(spec, times[i]);
    }
  }
  return out;
}

template <typename Scalar>
std::complex<Scalar> sample_at(const DenseSignal<Scalar>& x, Scalar t) {
  return sample_at(x, std::vector<Scalar>{t})[0];
}

/// Linear convolution with the integral's step weight: approximates
/// (h * s)(t) = integral h(tau) s(t - tau) dtau. Supports add.
template <typename Scalar>
DenseSignal<Scalar> convolve(const DenseSignal<Scalar>& h, const DenseSignal<Scalar>& s) {
  validate(h);
  validate(s);
  const Scalar dt = h.grid_step;
  if (std::abs(dt - s.grid_step) > Scalar(1e-12) * std::max(dt, s.grid_step))
    throw GridMismatch("convolution operands use different grid steps");

  const Eigen::Index out_len = h.size() + s.size() - 1;
  const Eigen::Index nfft = detail::next_fast_len(out_len);
  using Vector = typename DenseSignal<Scalar>::Vector;
  Vector a = Vector::Zero(nfft);
  Vector b = Vector::Zero(nfft);
  a.head(h.size()) = h.samples;
  b.head(s.size()) = s.samples;
  auto fa = detail::raw_fft<Scalar>(a);
  const auto fb = detail::raw_fft<Scalar>(b);
  fa.array() *= fb.array();
  const auto full = detail::raw_ifft<Scalar>(fa);

  DenseSignal<Scalar> out;
  out.samples = full.head(out_len) * dt;
  out.grid_step = dt;
  out.t0 = h.t0 + s.t0;
  return out;
}

}  // namespace uwbcap
