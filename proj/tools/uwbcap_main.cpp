#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "uwbcap/cir_io.hpp"
#include "uwbcap/cluster_model.hpp"
#include "uwbcap/errors.hpp"
#include "uwbcap/sweep.hpp"
#include "uwbcap/verify.hpp"

namespace {

struct GenerateArgs {
  uwbcap::ClusterModelParams params;
  int realizations = 100;
  std::string out;
};

struct SweepArgs {
  uwbcap::ClusterModelParams params;
  std::string bandwidths = "4e6..1024e6x2";
  int realizations = 100;
  bool realizations_given = false;
  std::uint64_t seed = 1;
  int phases = 4;
  int oversample = 16;
  double delay_spread = 279e-9;
  bool delay_spread_given = false;
  std::string cir_in;
  std::string out;
  bool fixed_eps = false;
  int threads = 0;  // 0 = one per hardware thread
};

struct VerifyArgs {
  int instances = 100;
  std::uint64_t seed = 1;
  std::string out;
};

int auto_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void add_model_flags(CLI::App& cmd, uwbcap::ClusterModelParams& params) {
  cmd.add_option("--cluster-rate", params.cluster_rate, "cluster arrival rate, 1/s")
      ->capture_default_str();
  cmd.add_option("--ray-rate", params.ray_rate, "ray arrival rate within a cluster, 1/s")
      ->capture_default_str();
  cmd.add_option("--cluster-decay", params.cluster_decay, "cluster power decay constant, s")
      ->capture_default_str();
  cmd.add_option("--ray-decay", params.ray_decay, "ray power decay constant, s")
      ->capture_default_str();
  cmd.add_option("--cluster-shadow", params.cluster_shadow_db,
                 "lognormal cluster shadowing std dev, dB (0 = off)")
      ->capture_default_str();
  cmd.add_option("--pulse-sigma", params.ray_pulse_sigma, "ray pulse width (Gaussian sigma), s")
      ->capture_default_str();
}

int run_generate(const GenerateArgs& args) {
  auto params = args.params;
  const auto records = uwbcap::generate_cirs(params, static_cast<std::size_t>(args.realizations));
  uwbcap::save_cir_file(args.out, records);
  std::printf("wrote %zu responses to %s\n", records.size(), args.out.c_str());
  return 0;
}

int run_sweep_command(const SweepArgs& args) {
  uwbcap::SweepConfig config;
  config.bandwidths = uwbcap::parse_bandwidth_ladder(args.bandwidths);
  config.master_seed = args.seed;
  config.phases = args.phases;
  config.oversample = args.oversample;
  config.delay_spread = args.delay_spread;
  config.fixed_eps = args.fixed_eps;
  config.threads = auto_threads(args.threads);
  config.output_path = args.out;
  if (args.cir_in.empty()) {
    config.realizations = args.realizations;
    config.source = args.params;
  } else {
    // A file source supplies its own responses; unless a count was requested
    // explicitly, use every record it holds.
    config.realizations = args.realizations_given ? args.realizations : 0;
    config.source = args.cir_in;
  }

  const uwbcap::PenaltyReport report = uwbcap::run_sweep(config);
  if (!args.cir_in.empty() && args.delay_spread_given &&
      std::abs(report.delay_spread - args.delay_spread) >
          1e-12 * std::max(report.delay_spread, args.delay_spread)) {
    std::fprintf(stderr, "note: %s declares a delay spread of %g s; using it instead of --ds %g\n",
                 args.cir_in.c_str(), report.delay_spread, args.delay_spread);
  }
  uwbcap::emit_report(report, config.output_path);
  return 0;
}

int run_verify_command(const VerifyArgs& args) {
  uwbcap::VerificationOptions options;
  options.instances = args.instances;
  options.seed = args.seed;
  const auto rows = uwbcap::run_verification(options);
  uwbcap::print_check_table(rows);
  if (!args.out.empty()) uwbcap::write_check_csv(rows, args.out);
  return uwbcap::all_pass(rows) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy capture of a bandlimited receiver over multipath channels:\n"
               "generate channel responses, sweep penalty vs. bandwidth, verify numerics"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("generate", "draw channel responses into a CIR file");
  gen_cmd->add_option("--seed", gen.params.seed, "master RNG seed")->capture_default_str();
  gen_cmd->add_option("--realizations", gen.realizations, "number of responses")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--ds", gen.params.delay_spread, "delay spread, s")->capture_default_str();
  gen_cmd->add_option("--grid-step", gen.params.grid_step, "dense grid step, s")
      ->capture_default_str();
  add_model_flags(*gen_cmd, gen.params);
  gen_cmd->add_option("--out", gen.out, "output CIR file")->required();

  SweepArgs sw;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "run the bandwidth/phase penalty sweep and report it");
  sweep_cmd->add_option("--seed", sw.seed, "master RNG seed")->capture_default_str();
  auto* sw_real =
      sweep_cmd->add_option("--realizations", sw.realizations, "responses per bandwidth")
          ->capture_default_str();
  sweep_cmd
      ->add_option("--bandwidths", sw.bandwidths,
                   "bandwidth list in Hz: \"a..bxk\" geometric ladder or comma-separated")
      ->capture_default_str();
  auto* sw_ds = sweep_cmd->add_option("--ds", sw.delay_spread, "delay spread, s")
                    ->capture_default_str();
  sweep_cmd->add_option("--phases", sw.phases, "sampling-phase hypotheses per bandwidth")
      ->capture_default_str();
  sweep_cmd->add_option("--oversample", sw.oversample, "grid oversampling vs. max bandwidth")
      ->capture_default_str();
  sweep_cmd->add_option("--cir-in", sw.cir_in, "read responses from a CIR file instead of generating");
  sweep_cmd->add_option("--out", sw.out, "aggregate CSV path (detail CSV written beside it)");
  sweep_cmd->add_flag("--fixed-eps", sw.fixed_eps,
                      "draw one timing offset per realization, reused across bandwidths");
  sweep_cmd->add_option("--threads", sw.threads, "worker threads (0 = all hardware threads)")
      ->capture_default_str();
  add_model_flags(*sweep_cmd, sw.params);

  VerifyArgs ver;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run the brute-force verification battery");
  verify_cmd->add_option("--instances", ver.instances, "randomized instances per check")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", ver.seed, "master RNG seed")->capture_default_str();
  verify_cmd->add_option("--out", ver.out, "write the check table as CSV");

  if (argc <= 1) {
    std::cout << app.help();
    return 1;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  sw.realizations_given = sw_real->count() > 0;
  sw.delay_spread_given = sw_ds->count() > 0;

  try {
    if (app.got_subcommand(gen_cmd)) return run_generate(gen);
    if (app.got_subcommand(sweep_cmd)) return run_sweep_command(sw);
    if (app.got_subcommand(verify_cmd)) return run_verify_command(ver);
  } catch (const uwbcap::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const uwbcap::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const uwbcap::UnsupportedVersion& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const uwbcap::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
