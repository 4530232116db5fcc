#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "uwbcap/errors.hpp"
#include "uwbcap/fourier.hpp"
#include "uwbcap/signal.hpp"

namespace uwbcap {

/// Number of receiver taps spanned by a delay spread at sampling period 1/W.
template <typename Scalar>
Eigen::Index tap_count(Scalar delay_spread, Scalar bandwidth) {
  if (delay_spread < Scalar(0)) throw Error("delay spread must be nonnegative");
  if (!(bandwidth > Scalar(0))) throw Error("bandwidth must be positive");
  return static_cast<Eigen::Index>(
      std::floor(static_cast<double>(delay_spread) * static_cast<double>(bandwidth)));
}

/// One discrete channel hypothesis: taps[l] = hT(k*T + l*T - delta).
template <typename Scalar>
struct ChannelCandidate {
  using Vector = typename DenseSignal<Scalar>::Vector;

  Vector taps;
  Scalar sample_time{};  // T
  Scalar offset{};       // delta in [0, T)
  Eigen::Index position{};  // k
  Scalar gain{};            // T * sum |taps|^2
};

template <typename Scalar>
struct AcquisitionResult {
  Eigen::Index best_position{};
  ChannelCandidate<Scalar> candidate;
};

namespace detail {

/// Evaluates an effective response on shifted sample combs {j*T - delta}.
/// When T is an exact number of grid steps this is one spectral phase ramp
/// plus decimation per delta; otherwise each time is synthesized from the
/// spectrum. Tap positions outside the represented extent count as zero (the
/// padding guarantees the response is below guard level out there).
template <typename Scalar>
class CombSampler {
 public:
  explicit CombSampler(const EffectiveResponse<Scalar>& ht)
      : grid_step_(ht.signal.grid_step),
        t0_(ht.signal.t0),
        size_(ht.signal.size()),
        period_(ht.sample_time) {
    const double stride_real = static_cast<double>(period_ / grid_step_);
    stride_ = static_cast<Eigen::Index>(std::llround(stride_real));
    commensurate_ = stride_ >= 1 &&
                    std::abs(stride_real - static_cast<double>(stride_)) <= 1e-6 * stride_real;
    origin_ = static_cast<Eigen::Index>(std::llround(static_cast<double>(-t0_ / grid_step_)));
    if (commensurate_) {
      raw_ = uwbcap::detail::raw_fft<Scalar>(ht.signal.samples);
      time_ = ht.signal.samples;  // delta = 0 decimates these directly
    } else {
      spectrum_ = dft(ht.signal);
    }
  }

  /// hT(j*T - delta) for j = j_lo .. j_hi inclusive.
  typename DenseSignal<Scalar>::Vector comb(Scalar delta, Eigen::Index j_lo,
                                            Eigen::Index j_hi) const {
    typename DenseSignal<Scalar>::Vector out(j_hi - j_lo + 1);
    if (commensurate_) {
      if (delta == Scalar(0)) {
        // Aligned comb: the taps are stored grid samples, return them verbatim.
        for (Eigen::Index j = j_lo; j <= j_hi; ++j) {
          const Eigen::Index idx = origin_ + j * stride_;
          out[j - j_lo] = (idx >= 0 && idx < size_) ? time_[idx] : std::complex<Scalar>{};
        }
        return out;
      }
      const Eigen::Index n = size_;
      const Scalar df = Scalar(1) / (static_cast<Scalar>(n) * grid_step_);
      typename DenseSignal<Scalar>::Vector ramped = raw_;
      for (Eigen::Index k = 0; k < n; ++k) {
        const Scalar f = static_cast<Scalar>(uwbcap::detail::signed_bin(k, n)) * df;
        ramped[k] *= uwbcap::detail::unit_phasor<Scalar>(-f * delta);
      }
      const auto shifted = uwbcap::detail::raw_ifft<Scalar>(ramped);
      for (Eigen::Index j = j_lo; j <= j_hi; ++j) {
        const Eigen::Index idx = origin_ + j * stride_;
        out[j - j_lo] = (idx >= 0 && idx < n) ? shifted[idx] : std::complex<Scalar>{};
      }
    } else {
      const Scalar t_min = t0_;
      const Scalar t_max = t0_ + static_cast<Scalar>(size_ - 1) * grid_step_;
      for (Eigen::Index j = j_lo; j <= j_hi; ++j) {
        const Scalar t = static_cast<Scalar>(j) * period_ - delta;
        out[j - j_lo] =
            (t >= t_min && t <= t_max) ? synthesize(spectrum_, t) : std::complex<Scalar>{};
      }
    }
    return out;
  }

 private:
  Scalar grid_step_;
  Scalar t0_;
  Eigen::Index size_;
  Scalar period_;
  Eigen::Index stride_{};
  Eigen::Index origin_{};
  bool commensurate_{};
  typename DenseSignal<Scalar>::Vector raw_;   // commensurate path: spectrum
  typename DenseSignal<Scalar>::Vector time_;  // commensurate path: grid samples
  Spectrum<Scalar> spectrum_;                  // synthesis path
};

template <typename Scalar>
void check_offset(Scalar delta, Scalar period) {
  if (!(delta >= Scalar(0)) || !(delta < period))
    throw OffsetOutOfRange("offset " + std::to_string(static_cast<double>(delta)) +
                           " s outside [0, " + std::to_string(static_cast<double>(period)) + ")");
}

template <typename Scalar>
ChannelCandidate<Scalar> candidate_from_comb(const CombSampler<Scalar>& sampler,
                                             const EffectiveResponse<Scalar>& ht, Scalar delta,
                                             Eigen::Index position) {
  const Eigen::Index taps = tap_count(ht.source_delay_spread, ht.bandwidth);
  ChannelCandidate<Scalar> out;
  out.sample_time = ht.sample_time;
  out.offset = delta;
  out.position = position;
  if (taps == 0) {
    out.taps.resize(0);
    out.gain = Scalar(0);
    return out;
  }
  out.taps = sampler.comb(delta, position, position + taps - 1);
  Scalar acc = 0;
  for (Eigen::Index l = 0; l < out.taps.size(); ++l) acc += std::norm(out.taps[l]);
  out.gain = ht.sample_time * acc;
  return out;
}

template <typename Scalar>
AcquisitionResult<Scalar> acquire_with(const CombSampler<Scalar>& sampler,
                                       const EffectiveResponse<Scalar>& ht, Scalar delta,
                                       Eigen::Index window_lo, Eigen::Index window_hi) {
  const Eigen::Index taps = tap_count(ht.source_delay_spread, ht.bandwidth);
  AcquisitionResult<Scalar> result;
  if (taps == 0) {
    result.best_position = window_lo;
    result.candidate = candidate_from_comb(sampler, ht, delta, window_lo);
    return result;
  }

  const Eigen::Index j_lo = window_lo;
  const Eigen::Index j_hi = window_hi + taps - 1;
  const auto values = sampler.comb(delta, j_lo, j_hi);

  // Sliding-window energies via prefix sums; the winner's gain is recomputed
  // directly below so it matches extract_candidate bit for bit.
  std::vector<Scalar> prefix(static_cast<std::size_t>(values.size()) + 1, Scalar(0));
  for (Eigen::Index i = 0; i < values.size(); ++i)
    prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] + std::norm(values[i]);

  Eigen::Index best_k = window_lo;
  Scalar best_sum = -Scalar(1);
  for (Eigen::Index k = window_lo; k <= window_hi; ++k) {
    const auto a = static_cast<std::size_t>(k - j_lo);
    const Scalar sum = prefix[a + static_cast<std::size_t>(taps)] - prefix[a];
    if (sum > best_sum) {
      best_sum = sum;
      best_k = k;
    }
  }

  result.best_position = best_k;
  result.candidate = candidate_from_comb(sampler, ht, delta, best_k);
  return result;
}

}  // namespace detail

/// Taps hT(k*T + l*T - delta), l = 0..L-1, with L = floor(Ds * W).
template <typename Scalar>
ChannelCandidate<Scalar> extract_candidate(const EffectiveResponse<Scalar>& ht, Scalar delta,
                                           Eigen::Index position) {
  detail::check_offset(delta, ht.sample_time);
  detail::CombSampler<Scalar> sampler(ht);
  return detail::candidate_from_comb(sampler, ht, delta, position);
}

/// Energy-based large-scale acquisition: the candidate position in
/// [window_lo, window_hi] with maximal gain; ties go to the smallest k.
template <typename Scalar>
AcquisitionResult<Scalar> acquire(const EffectiveResponse<Scalar>& ht, Scalar delta,
                                  Eigen::Index window_lo, Eigen::Index window_hi) {
  detail::check_offset(delta, ht.sample_time);
  if (window_lo > window_hi)
    throw EmptyWindow("acquisition window [" + std::to_string(window_lo) + ", " +
                      std::to_string(window_hi) + "] is empty");
  detail::CombSampler<Scalar> sampler(ht);
  return detail::acquire_with(sampler, ht, delta, window_lo, window_hi);
}

/// Penalty summary for one response at one bandwidth.
template <typename Scalar>
struct PenaltyRecord {
  Scalar eps{};                 // drawn timing offset in [0, T/M)
  std::vector<Scalar> gains;    // acquired gain per phase hypothesis m
  Scalar penalty{};             // 1 - min(gains)/max(gains)
};

template <typename Scalar>
Scalar penalty_from_gains(const std::vector<Scalar>& gains) {
  if (gains.empty()) throw Error("penalty needs at least one gain");
  const Scalar lo = *std::min_element(gains.begin(), gains.end());
  const Scalar hi = *std::max_element(gains.begin(), gains.end());
  if (!(hi > Scalar(0))) return Scalar(0);  // all-equal (all-zero) capture
  return Scalar(1) - lo / hi;
}

/// Worst-phase energy-capture penalty: lowpass h to bandwidth W, acquire at
/// each of the M offsets eps + m*T/M over the full window k in [-L, L], and
/// compare best and worst captured gain.
template <typename Scalar>
PenaltyRecord<Scalar> phase_penalty(const ImpulseResponse<Scalar>& h, Scalar bandwidth, Scalar eps,
                                    int phases) {
  if (phases < 2) throw ConfigError("phase count must be at least 2");
  const Scalar period = Scalar(1) / bandwidth;
  const Scalar eps_limit = period / static_cast<Scalar>(phases);
  if (!(eps >= Scalar(0)) || !(eps < eps_limit))
    throw OffsetOutOfRange("eps " + std::to_string(static_cast<double>(eps)) +
                           " s outside [0, " + std::to_string(static_cast<double>(eps_limit)) +
                           ")");

  const EffectiveResponse<Scalar> ht = ideal_lowpass(h, bandwidth);
  const Eigen::Index taps = tap_count(h.delay_spread, bandwidth);
  detail::CombSampler<Scalar> sampler(ht);

  PenaltyRecord<Scalar> record;
  record.eps = eps;
  record.gains.reserve(static_cast<std::size_t>(phases));
  for (int m = 0; m < phases; ++m) {
    Scalar delta = eps + static_cast<Scalar>(m) * period / static_cast<Scalar>(phases);
    if (delta >= period) delta = std::nextafter(period, Scalar(0));  // roundoff clamp
    const auto acq = detail::acquire_with(sampler, ht, delta, -taps, taps);
    record.gains.push_back(acq.candidate.gain);
  }
  record.penalty = penalty_from_gains(record.gains);
  return record;
}

}  // namespace uwbcap
