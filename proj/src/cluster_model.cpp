#include "uwbcap/cluster_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "uwbcap/errors.hpp"
#include "uwbcap/rng.hpp"

namespace uwbcap {

namespace {

constexpr std::uint64_t kRealizationKey = 0x6369722d73747265ull;  // substream tag

void check_params(const ClusterModelParams& p) {
  if (!(p.cluster_rate > 0) || !(p.ray_rate > 0) || !(p.cluster_decay > 0) ||
      !(p.ray_decay > 0) || !(p.delay_spread > 0) || !(p.grid_step > 0) ||
      !(p.ray_pulse_sigma > 0))
    throw DegenerateParams("cluster model rates, decays, spread, grid step, and pulse width must be positive");
  if (!(p.cluster_shadow_db >= 0))
    throw DegenerateParams("cluster shadowing standard deviation must be nonnegative");
  if (p.cluster_rate * p.delay_spread < 1.0 || p.ray_rate * p.delay_spread < 1.0)
    throw DegenerateParams("expected arrivals in [0, delay spread] below one");
}

std::string describe(const ClusterModelParams& p) {
  std::ostringstream os;
  os << "cluster-model"
     << " cluster_rate=" << p.cluster_rate << " ray_rate=" << p.ray_rate
     << " cluster_decay=" << p.cluster_decay << " ray_decay=" << p.ray_decay
     << " cluster_shadow_db=" << p.cluster_shadow_db
     << " delay_spread=" << p.delay_spread << " seed=" << p.seed
     << " grid_step=" << p.grid_step << " pulse_sigma=" << p.ray_pulse_sigma;
  return os.str();
}

}  // namespace

std::vector<CirRecord> generate_cirs(const ClusterModelParams& params, std::size_t count) {
  check_params(params);
  if (count == 0) return {};

  const double dt = params.grid_step;
  const double spread = params.delay_spread;
  const double sigma = params.ray_pulse_sigma;
  // Grid points covering [0, spread); a point landing exactly on the spread is
  // dropped so the support stays strictly inside it.
  auto support = static_cast<Eigen::Index>(std::floor(spread / dt)) + 1;
  if (static_cast<double>(support - 1) * dt >= spread * (1.0 - 1e-12)) --support;
  if (support < 1) support = 1;
  // unit-energy Gaussian pulse, cut where it is numerically gone
  const double pulse_scale = std::pow(std::numbers::pi * sigma * sigma, -0.25);
  const auto pulse_reach = static_cast<Eigen::Index>(std::ceil(7.0 * sigma / dt));
  const std::string meta = describe(params);

  std::vector<CirRecord> records;
  records.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    rng::Stream stream(params.seed, {kRealizationKey, static_cast<std::uint64_t>(i)});

    DenseSignald signal;
    signal.samples.setZero(support);
    signal.grid_step = dt;
    signal.t0 = 0.0;

    // Clusters arrive Poisson from zero; each opens with a ray at its start.
    // sigma_ln converts the shadowing spread from dB of power to the natural
    // log; exp(sigma*z - sigma^2/2) has unit mean, so the average profile
    // still follows the plain decay law.
    const double sigma_ln = std::numbers::ln10 / 10.0 * params.cluster_shadow_db;
    double cluster_time = 0.0;
    while (cluster_time <= spread) {
      const double shadow_z = std::sqrt(2.0) * std::real(stream.complex_normal());
      const double shadow =
          std::exp(sigma_ln * shadow_z - 0.5 * sigma_ln * sigma_ln);
      const double cluster_power = shadow * std::exp(-cluster_time / params.cluster_decay);
      double ray_delay = 0.0;
      while (cluster_time + ray_delay <= spread) {
        const double mean_power = cluster_power * std::exp(-ray_delay / params.ray_decay);
        const std::complex<double> amplitude =
            std::sqrt(mean_power) * stream.complex_normal();
        const double ray_time = cluster_time + ray_delay;

        // accumulate the ray's pulse on the grid, truncated to [0, spread]
        const auto center = static_cast<Eigen::Index>(std::llround(ray_time / dt));
        const Eigen::Index lo = std::max<Eigen::Index>(center - pulse_reach, 0);
        const Eigen::Index hi = std::min<Eigen::Index>(center + pulse_reach, support - 1);
        for (Eigen::Index n = lo; n <= hi; ++n) {
          const double u = (static_cast<double>(n) * dt - ray_time) / sigma;
          signal.samples[n] += amplitude * (pulse_scale * std::exp(-0.5 * u * u));
        }
        ray_delay += stream.exponential(params.ray_rate);
      }
      cluster_time += stream.exponential(params.cluster_rate);
    }

    const double raw_energy = energy(signal);
    if (!(raw_energy > 0)) throw DegenerateParams("generated realization has zero energy");
    signal.samples /= std::sqrt(raw_energy);

    CirRecord record;
    record.id = static_cast<std::uint64_t>(i);
    record.response = make_impulse_response(std::move(signal), spread);
    record.meta = meta;
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace uwbcap
