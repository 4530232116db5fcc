#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uwbcap/signal.hpp"

namespace uwbcap {

/// Clustered multipath generator parameters. Arrivals form a Poisson cluster
/// process (one cluster fixed at zero delay, one ray at each cluster start)
/// with doubly exponential mean power decay and circularly-symmetric complex
/// Gaussian ray amplitudes. Each cluster's power additionally carries mean-one
/// lognormal shadowing of standard deviation cluster_shadow_db around the
/// decay law, as measured cluster models do; zero disables it. Rays are
/// rendered as unit-energy Gaussian pulses of width ray_pulse_sigma,
/// hard-truncated to [0, delay_spread], and each realization is normalized to
/// unit energy.
struct ClusterModelParams {
  double cluster_rate = 0.047e9;   // clusters per second
  double ray_rate = 1.54e9;        // rays per second within a cluster
  double cluster_decay = 22.6e-9;  // seconds
  double ray_decay = 12.5e-9;      // seconds
  double cluster_shadow_db = 0.0;  // lognormal cluster shadowing, dB (0 = off)
  double delay_spread = 279e-9;    // seconds, support bound
  std::uint64_t seed = 1;
  double grid_step = 1.0 / (16.0 * 1024e6);  // dense-grid step, seconds
  double ray_pulse_sigma = 0.6e-9;           // seconds; keeps h effectively band-limited
};

/// One generated (or ingested) channel realization.
struct CirRecord {
  std::uint64_t id{};
  ImpulseResponsed response;
  std::string meta;  // generation parameters or source filename
};

/// Deterministic set of channel realizations: realization i depends only on
/// (params.seed, i), so any execution order produces identical records.
std::vector<CirRecord> generate_cirs(const ClusterModelParams& params, std::size_t count);

}  // namespace uwbcap
