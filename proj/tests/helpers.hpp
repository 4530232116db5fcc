#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "uwbcap/signal.hpp"

namespace testutil {

using Complex = std::complex<double>;
using Vector = uwbcap::DenseSignald::Vector;

inline uwbcap::DenseSignald make_signal(const std::vector<Complex>& samples, double grid_step,
                                        double t0 = 0.0) {
  uwbcap::DenseSignald x;
  x.samples.resize(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t n = 0; n < samples.size(); ++n)
    x.samples[static_cast<Eigen::Index>(n)] = samples[n];
  x.grid_step = grid_step;
  x.t0 = t0;
  return x;
}

/// One Gaussian bump amplitude * exp(-(t-center)^2 / (2 sigma^2)).
struct Bump {
  double center{};
  double sigma{};
  Complex amplitude{1.0, 0.0};
};

/// Sum of Gaussian bumps sampled on an n-point grid starting at t0.
inline uwbcap::DenseSignald bump_signal(Eigen::Index n, double grid_step, double t0,
                                        const std::vector<Bump>& bumps) {
  uwbcap::DenseSignald x;
  x.samples.setZero(n);
  x.grid_step = grid_step;
  x.t0 = t0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = x.time_at(i);
    for (const auto& b : bumps) {
      const double u = (t - b.center) / b.sigma;
      x.samples[i] += b.amplitude * std::exp(-0.5 * u * u);
    }
  }
  return x;
}

/// Complex exponential amplitude * exp(j 2 pi freq t) sampled on the grid.
inline uwbcap::DenseSignald tone_signal(Eigen::Index n, double grid_step, double t0, double freq,
                                        Complex amplitude = {1.0, 0.0}) {
  uwbcap::DenseSignald x;
  x.samples.resize(n);
  x.grid_step = grid_step;
  x.t0 = t0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double cycles = freq * x.time_at(i);
    const double angle = 2.0 * std::numbers::pi * std::remainder(cycles, 1.0);
    x.samples[i] = amplitude * Complex(std::cos(angle), std::sin(angle));
  }
  return x;
}

inline double peak(const Vector& v) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

inline double max_abs_diff(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double m = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline bool bitwise_equal(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

/// Largest increase discrepancy[i+1] - discrepancy[i] along a trace that is
/// expected to be nonincreasing (0 when it never increases).
inline double max_increase(const std::vector<double>& values) {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    worst = std::max(worst, values[i + 1] - values[i]);
  return worst;
}

}  // namespace testutil
