// gaitkit command-line front end: synthesize walks, run the estimator,
// validate recordings against the model's spectral signature, and benchmark
// the filter step.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "gaitkit/gaitkit.hpp"

namespace {

int cmd_estimate(const std::string& input, const std::string& output, const std::string& config,
                 const std::string& metrics, double skip_seconds) {
  const gaitkit::PipelineConfig cfg = gaitkit::load_config(config);
  const gaitkit::CsvData data = gaitkit::read_samples_csv(input);
  const gaitkit::EstimateResult result = gaitkit::run_estimate(data, cfg, skip_seconds);
  gaitkit::write_estimates_csv(output, result.rows);
  if (metrics.empty()) {
    gaitkit::write_metrics(std::cout, result.metrics);
  } else {
    gaitkit::write_metrics_file(metrics, result.metrics);
  }
  return 0;
}

int cmd_simulate(double outer, double inner, double z0, const std::string& profile_path,
                 double noise, std::uint64_t seed, double rate, double duration,
                 const std::string& out) {
  const gaitkit::WalkProfile profile = gaitkit::load_profile(profile_path);
  gaitkit::YoyoParams params;
  params.outer_radius = outer;
  params.inner_radius = inner;
  params.vertical_offset = z0;
  const double span = duration > 0.0 ? duration : profile.total_duration();
  const auto samples =
      gaitkit::simulate_walk(params, profile, 1.0 / rate, span, noise, noise, seed);
  gaitkit::write_velocity_csv(out, samples);
  return 0;
}

int cmd_validate(const std::string& input, double band_low, double band_high) {
  const gaitkit::CsvData data = gaitkit::read_samples_csv(input);
  const std::vector<gaitkit::VelocitySample> samples =
      data.kind == gaitkit::CsvKind::position
          ? gaitkit::preprocess(data.positions, gaitkit::PreprocessConfig{})
          : data.velocities;
  const gaitkit::ValidationResult res =
      gaitkit::validate_recording(samples, {band_low, band_high});
  std::cout << "pass = " << (res.pass ? 1 : 0) << '\n';
  if (!res.pass) std::cout << "reason = " << res.reason << '\n';
  std::cout << "peak_frequency = " << gaitkit::detail::format_double(res.report.peak_frequency)
            << '\n'
            << "peak_amplitude = " << gaitkit::detail::format_double(res.report.peak_amplitude)
            << '\n'
            << "phase_offset_deg = "
            << gaitkit::detail::format_double(res.report.phase_offset_deg) << '\n'
            << "resolution = " << gaitkit::detail::format_double(res.report.resolution) << '\n';
  return res.pass ? 0 : 2;
}

int cmd_benchmark(std::size_t iters) {
  const gaitkit::BenchmarkReport report = gaitkit::run_benchmark(iters);
  std::cout << "iterations = " << report.iterations << '\n'
            << "mean_us = " << report.mean_us << '\n'
            << "p99_us = " << report.p99_us << '\n'
            << "realtime_factor_25hz = " << 40000.0 / report.mean_us << '\n'
            << "checksum = " << gaitkit::detail::format_double(report.checksum) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Real-time gait kinematics estimation toolkit"};
  app.require_subcommand(1);

  auto* estimate = app.add_subcommand("estimate", "Run the estimator over a recording");
  std::string est_input, est_output, est_config, est_metrics;
  double skip_seconds = 0.0;
  estimate->add_option("--input", est_input, "Input CSV (t,vx,vz or t,px,py,pz)")->required();
  estimate->add_option("--output", est_output, "Output estimates CSV")->required();
  estimate->add_option("--config", est_config, "Run configuration file")->required();
  estimate->add_option("--metrics", est_metrics, "Write metrics here instead of stdout");
  estimate->add_option("--skip-seconds", skip_seconds,
                       "Exclude this warm-up prefix from the metrics");

  auto* simulate = app.add_subcommand("simulate", "Synthesize a walk recording");
  double sim_outer = 2.0, sim_inner = 0.2, sim_z0 = 1.0, sim_noise = 0.0;
  double sim_rate = 25.0, sim_duration = 0.0;
  std::uint64_t sim_seed = 0;
  std::string sim_profile, sim_out;
  simulate->add_option("--R", sim_outer, "Outer radius, m")->required();
  simulate->add_option("--r", sim_inner, "Inner radius, m")->required();
  simulate->add_option("--z0", sim_z0, "Vertical offset, m");
  simulate->add_option("--profile", sim_profile, "Cadence profile file")->required();
  simulate->add_option("--noise", sim_noise, "Velocity noise std per axis, m/s")->required();
  simulate->add_option("--seed", sim_seed, "RNG seed")->required();
  simulate->add_option("--rate", sim_rate, "Sample rate, Hz");
  simulate->add_option("--duration", sim_duration,
                       "Length, s (default: profile total duration)");
  simulate->add_option("--out", sim_out, "Output velocity CSV")->required();

  auto* validate = app.add_subcommand("validate", "Check a recording against the gait model");
  std::string val_input;
  double band_low = 0.5, band_high = 3.0;
  validate->add_option("--input", val_input, "Input CSV")->required();
  validate->add_option("--band-low", band_low, "Search band lower edge, Hz");
  validate->add_option("--band-high", band_high, "Search band upper edge, Hz");

  auto* benchmark = app.add_subcommand("benchmark", "Time the filter step");
  std::size_t iters = 1000000;
  benchmark->add_option("--iters", iters, "Iterations (>= 1e5)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*estimate) return cmd_estimate(est_input, est_output, est_config, est_metrics, skip_seconds);
    if (*simulate) {
      return cmd_simulate(sim_outer, sim_inner, sim_z0, sim_profile, sim_noise, sim_seed, sim_rate,
                          sim_duration, sim_out);
    }
    if (*validate) return cmd_validate(val_input, band_low, band_high);
    if (*benchmark) return cmd_benchmark(iters);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
