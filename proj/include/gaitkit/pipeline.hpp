#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitkit/config.hpp"
#include "gaitkit/csv.hpp"
#include "gaitkit/param_extraction.hpp"
#include "gaitkit/preprocessing.hpp"
#include "gaitkit/sinusoid_ekf.hpp"
#include "gaitkit/yoyo_model.hpp"

namespace gaitkit {

/// One output row of an estimation run. omega_hat is back in rad/s; the
/// bias/amplitude estimates stay in the filter's per-sample units.
struct EstimateRow {
  double t = 0.0;
  double vx_meas = 0.0;      // m/s
  double vz_meas = 0.0;      // m/s
  double omega_hat = 0.0;    // rad/s
  double a0_hat = 0.0;       // m/sample
  double a1_hat = 0.0;       // m/sample
  double outer_radius = 0.0; // m
  double inner_radius = 0.0; // m
  double vx_hat = 0.0;       // m/s
  double vz_hat = 0.0;       // m/s
  bool gate_active = false;
};

/// Per-axis mean squared error between estimate and measurement, plus the
/// standard deviation of those squared errors (the spread statistic
/// reported alongside each mean).
struct ErrorMetrics {
  double mse_vx = 0.0;
  double std_vx = 0.0;
  double mse_vz = 0.0;
  double std_vz = 0.0;
  std::size_t n_samples = 0;
};

inline ErrorMetrics compute_metrics(const std::vector<VelocitySample>& measured,
                                    const std::vector<VelocitySample>& estimated) {
  if (measured.size() != estimated.size()) {
    throw std::invalid_argument("compute_metrics: sequence lengths differ");
  }
  if (measured.empty()) throw std::invalid_argument("compute_metrics: empty sequences");

  const auto n = static_cast<double>(measured.size());
  double sum_x = 0.0, sum_z = 0.0;
  std::vector<double> sq_x(measured.size()), sq_z(measured.size());
  for (std::size_t i = 0; i < measured.size(); ++i) {
    const double dx = measured[i].vx - estimated[i].vx;
    const double dz = measured[i].vz - estimated[i].vz;
    sq_x[i] = dx * dx;
    sq_z[i] = dz * dz;
    sum_x += sq_x[i];
    sum_z += sq_z[i];
  }
  ErrorMetrics m;
  m.n_samples = measured.size();
  m.mse_vx = sum_x / n;
  m.mse_vz = sum_z / n;
  double var_x = 0.0, var_z = 0.0;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    var_x += (sq_x[i] - m.mse_vx) * (sq_x[i] - m.mse_vx);
    var_z += (sq_z[i] - m.mse_vz) * (sq_z[i] - m.mse_vz);
  }
  m.std_vx = std::sqrt(var_x / n);
  m.std_vz = std::sqrt(var_z / n);
  return m;
}

struct EstimateResult {
  std::vector<EstimateRow> rows;
  ErrorMetrics metrics;
};

/// Runs the full estimation chain on parsed input: preprocess if the input
/// is positions, then stream every velocity sample through the filter and
/// the parameter tracker. Metrics compare the reconstructed velocities
/// against the measured ones, optionally skipping a warm-up prefix.
inline EstimateResult run_estimate(const CsvData& data, const PipelineConfig& config,
                                   double skip_seconds = 0.0) {
  config.ekf.validate();
  if (!(skip_seconds >= 0.0)) {
    throw std::invalid_argument("run_estimate: skip_seconds must be >= 0");
  }

  const std::vector<VelocitySample> samples =
      data.kind == CsvKind::position ? preprocess(data.positions, config.preprocess)
                                     : data.velocities;
  if (samples.size() < 2) throw std::invalid_argument("run_estimate: need at least two samples");

  // The filter tuning assumes its configured sampling interval; refuse
  // input sampled at a different rate instead of silently mistracking.
  std::vector<double> times;
  times.reserve(samples.size());
  for (const auto& s : samples) times.push_back(s.t);
  const double dt = detail::uniform_interval(times);
  const double t_step = config.ekf.sample_time;
  if (std::abs(dt - t_step) > 0.01 * t_step) {
    throw std::invalid_argument("run_estimate: input interval " + std::to_string(dt) +
                                " s does not match configured T = " + std::to_string(t_step) +
                                " s");
  }

  EkfState state = config.ekf.initial_state;
  EkfCovariance cov = config.ekf.prior_covariance;
  ParamTracker tracker(config.params);

  EstimateResult result;
  result.rows.reserve(samples.size());
  for (const auto& s : samples) {
    const Measurement z{s.vx * t_step, s.vz * t_step};
    const StepResult r = step(state, cov, z, config.ekf);
    state = r.state;
    cov = r.covariance;
    tracker.update(state);
    const VelocityEstimate est = reconstruct_velocity(state, tracker, t_step);

    EstimateRow row;
    row.t = s.t;
    row.vx_meas = s.vx;
    row.vz_meas = s.vz;
    row.omega_hat = state.frequency / t_step;
    row.a0_hat = state.bias;
    row.a1_hat = state.amplitude();
    row.outer_radius = tracker.outer_radius();
    row.inner_radius = tracker.inner_radius();
    row.vx_hat = est.vx;
    row.vz_hat = est.vz;
    row.gate_active = tracker.gate_active();
    result.rows.push_back(row);
  }

  const double t_begin = result.rows.front().t + skip_seconds;
  std::vector<VelocitySample> measured, estimated;
  for (const auto& row : result.rows) {
    if (row.t < t_begin) continue;
    measured.push_back({row.t, row.vx_meas, row.vz_meas});
    estimated.push_back({row.t, row.vx_hat, row.vz_hat});
  }
  if (measured.empty()) {
    throw std::invalid_argument("run_estimate: skip_seconds leaves no samples for metrics");
  }
  result.metrics = compute_metrics(measured, estimated);
  return result;
}

inline void write_estimates_csv(const std::string& path, const std::vector<EstimateRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "t,vx_meas,vz_meas,omega_hat,A0_hat,A1_hat,R_hat,r_hat,vx_hat,vz_hat,gate_active\n";
  for (const auto& r : rows) {
    out << detail::format_double(r.t) << ',' << detail::format_double(r.vx_meas) << ','
        << detail::format_double(r.vz_meas) << ',' << detail::format_double(r.omega_hat) << ','
        << detail::format_double(r.a0_hat) << ',' << detail::format_double(r.a1_hat) << ','
        << detail::format_double(r.outer_radius) << ',' << detail::format_double(r.inner_radius)
        << ',' << detail::format_double(r.vx_hat) << ',' << detail::format_double(r.vz_hat) << ','
        << (r.gate_active ? 1 : 0) << '\n';
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

inline void write_metrics(std::ostream& out, const ErrorMetrics& m) {
  out << "mse_vx = " << detail::format_double(m.mse_vx) << '\n'
      << "std_vx = " << detail::format_double(m.std_vx) << '\n'
      << "mse_vz = " << detail::format_double(m.mse_vz) << '\n'
      << "std_vz = " << detail::format_double(m.std_vz) << '\n'
      << "n_samples = " << m.n_samples << '\n';
}

inline void write_metrics_file(const std::string& path, const ErrorMetrics& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  write_metrics(out, m);
  if (!out) throw std::runtime_error(path + ": write failed");
}

struct BenchmarkReport {
  std::size_t iterations = 0;
  double mean_us = 0.0;
  double p99_us = 0.0;
  double checksum = 0.0; // state-dependent value so the loop cannot be optimized away
};

/// Times one filter step plus one tracker update per iteration on
/// pre-generated synthetic data (I/O excluded). Per-iteration wall times
/// feed the mean and the 99th percentile.
inline BenchmarkReport run_benchmark(std::size_t iterations) {
  if (iterations < 100000) {
    throw std::invalid_argument("run_benchmark: need at least 1e5 iterations");
  }

  const YoyoParams params;
  WalkProfile profile;
  profile.segments.push_back({60.0, 2.5});
  const PipelineConfig config; // stock tuning
  const double t_step = config.ekf.sample_time;
  const auto data = simulate_walk(params, profile, t_step, 60.0, 0.02, 0.02, 7);

  EkfState state = config.ekf.initial_state;
  EkfCovariance cov = config.ekf.prior_covariance;
  ParamTracker tracker(config.params);

  std::vector<double> elapsed_us(iterations);
  double checksum = 0.0;
  using clock = std::chrono::steady_clock;
  for (std::size_t i = 0; i < iterations; ++i) {
    const auto& s = data[i % data.size()];
    const Measurement z{s.vx * t_step, s.vz * t_step};
    const auto begin = clock::now();
    const StepResult r = step(state, cov, z, config.ekf);
    state = r.state;
    cov = r.covariance;
    tracker.update(state);
    const auto end = clock::now();
    elapsed_us[i] = std::chrono::duration<double, std::micro>(end - begin).count();
    checksum += state.frequency + tracker.outer_radius();
  }

  BenchmarkReport report;
  report.iterations = iterations;
  double sum = 0.0;
  for (double e : elapsed_us) sum += e;
  report.mean_us = sum / static_cast<double>(iterations);
  std::sort(elapsed_us.begin(), elapsed_us.end());
  const auto p99_index = static_cast<std::size_t>(
      std::ceil(0.99 * static_cast<double>(iterations))) - 1;
  report.p99_us = elapsed_us[std::min(p99_index, iterations - 1)];
  report.checksum = checksum;
  return report;
}

}  // namespace gaitkit
