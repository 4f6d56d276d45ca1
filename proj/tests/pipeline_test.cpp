#include "gaitkit/pipeline.hpp"

#include <gtest/gtest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "gaitkit/config.hpp"
#include "gaitkit/csv.hpp"
#include "gaitkit/spectral_validation.hpp"

namespace {

using namespace gaitkit;

namespace fs = std::filesystem;

// Unique scratch file that cleans up after itself.
class TempFile {
 public:
  explicit TempFile(const std::string& name)
      : path_(fs::temp_directory_path() /
              ("gaitkit_test_" + std::to_string(::getpid()) + "_" + name)) {}
  ~TempFile() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  const std::string& str() const { return str_cache_ = path_.string(); }

 private:
  fs::path path_;
  mutable std::string str_cache_;
};

std::vector<VelocitySample> reference_walk(double noise, std::uint64_t seed,
                                           double duration = 60.0) {
  YoyoParams params;
  WalkProfile profile;
  profile.segments.push_back({duration, 2.5});
  return simulate_walk(params, profile, 0.04, duration, noise, noise, seed);
}

TEST(ConfigTest, EmptyTextYieldsStockTuning) {
  const PipelineConfig cfg = parse_config_text("");
  EXPECT_EQ(cfg.ekf.process_noise_diag[2], 1e-3);
  EXPECT_EQ(cfg.ekf.measurement_noise_diag[0], 1e-2);
  EXPECT_TRUE(cfg.ekf.prior_covariance.isIdentity(0.0));
  EXPECT_EQ(cfg.ekf.sample_time, 0.04);
  EXPECT_EQ(cfg.ekf.initial_state.osc_cos, 0.2 * 0.1); // r0 * omega0
  EXPECT_EQ(cfg.ekf.initial_state.bias, 0.2);
  EXPECT_EQ(cfg.params.window, 10);
  EXPECT_EQ(cfg.params.freq_threshold, 0.1);
  EXPECT_EQ(cfg.params.initial_outer, 2.0);
  EXPECT_EQ(cfg.preprocess.sg_window, 11);
  EXPECT_EQ(cfg.preprocess.target_rate, 25.0);
}

TEST(ConfigTest, OverridesLandInTheRightPlaces) {
  const std::string text = R"(
# tuning for a smaller walker
q3 = 2e-3
v2 = 5e-2
p0_scale = 0.5
T = 0.02
omega0 = 0.2
R0 = 1.5
r0 = 0.1
n = 5
mu_omega = 0.15
mu_a0 = 0.12
sg_window = 9
sg_order = 2
target_rate = 50
)";
  const PipelineConfig cfg = parse_config_text(text);
  EXPECT_EQ(cfg.ekf.process_noise_diag[2], 2e-3);
  EXPECT_EQ(cfg.ekf.process_noise_diag[0], 1e-5); // untouched default
  EXPECT_EQ(cfg.ekf.measurement_noise_diag[1], 5e-2);
  EXPECT_EQ(cfg.ekf.prior_covariance(0, 0), 0.5);
  EXPECT_EQ(cfg.ekf.sample_time, 0.02);
  // Initial state is derived from (omega0, R0, r0).
  EXPECT_NEAR(cfg.ekf.initial_state.osc_cos, 0.1 * 0.2, 1e-15);
  EXPECT_EQ(cfg.ekf.initial_state.osc_sin, 0.0);
  EXPECT_EQ(cfg.ekf.initial_state.frequency, 0.2);
  EXPECT_NEAR(cfg.ekf.initial_state.bias, 1.5 * 0.2, 1e-15);
  EXPECT_EQ(cfg.params.window, 5);
  EXPECT_EQ(cfg.params.freq_threshold, 0.15);
  EXPECT_EQ(cfg.params.bias_threshold, 0.12);
  EXPECT_EQ(cfg.params.initial_outer, 1.5);
  EXPECT_EQ(cfg.params.initial_inner, 0.1);
  EXPECT_EQ(cfg.preprocess.sg_window, 9);
  EXPECT_EQ(cfg.preprocess.sg_order, 2);
  EXPECT_EQ(cfg.preprocess.target_rate, 50.0);
}

TEST(ConfigTest, RejectsMalformedInput) {
  EXPECT_THROW(parse_config_text("q9 = 1.0"), std::invalid_argument);       // unknown key
  EXPECT_THROW(parse_config_text("T = 0.04\nT = 0.02"), std::invalid_argument); // duplicate
  EXPECT_THROW(parse_config_text("T 0.04"), std::invalid_argument);         // missing '='
  EXPECT_THROW(parse_config_text("T = fast"), std::invalid_argument);       // not a number
  EXPECT_THROW(parse_config_text("n = 2.5"), std::invalid_argument);        // not an integer
  EXPECT_THROW(parse_config_text("T = -0.04"), std::invalid_argument);      // invariant violation
  EXPECT_THROW(parse_config_text("p0_scale = 0"), std::invalid_argument);
  EXPECT_THROW(parse_config_text("sg_window = 4"), std::invalid_argument);
}

TEST(ConfigTest, CommentsAndWhitespaceAreTolerated) {
  const PipelineConfig cfg = parse_config_text("  T=0.08   # slow rate\n\n   \n q1 = 2e-5\n");
  EXPECT_EQ(cfg.ekf.sample_time, 0.08);
  EXPECT_EQ(cfg.ekf.process_noise_diag[0], 2e-5);
}

TEST(ProfileTest, ParsesPhaseAndSegments) {
  const WalkProfile p = parse_profile_text("# warmup walk\nphase0 0.5\nsegment 30 3.0\nsegment 30 1.5\n");
  EXPECT_EQ(p.initial_phase, 0.5);
  ASSERT_EQ(p.segments.size(), 2u);
  EXPECT_EQ(p.segments[0].duration, 30.0);
  EXPECT_EQ(p.segments[0].omega, 3.0);
  EXPECT_EQ(p.segments[1].omega, 1.5);
}

TEST(ProfileTest, RejectsMalformedProfiles) {
  EXPECT_THROW(parse_profile_text(""), std::invalid_argument);                 // no segments
  EXPECT_THROW(parse_profile_text("walk 10 2.5"), std::invalid_argument);      // unknown directive
  EXPECT_THROW(parse_profile_text("segment 10"), std::invalid_argument);       // missing omega
  EXPECT_THROW(parse_profile_text("segment 10 2.5 7"), std::invalid_argument); // trailing token
  EXPECT_THROW(parse_profile_text("segment -1 2.5"), std::invalid_argument);   // bad duration
  EXPECT_THROW(parse_profile_text("phase0 0.1\nphase0 0.2\nsegment 1 1"), std::invalid_argument);
}

TEST(CsvTest, VelocityRoundTripIsExact) {
  const auto samples = reference_walk(0.05, 9, 4.0);
  TempFile file("roundtrip.csv");
  write_velocity_csv(file.str(), samples);
  const CsvData data = read_samples_csv(file.str());
  ASSERT_EQ(data.kind, CsvKind::velocity);
  ASSERT_EQ(data.velocities.size(), samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EXPECT_EQ(data.velocities[i].t, samples[i].t) << "row " << i;
    EXPECT_EQ(data.velocities[i].vx, samples[i].vx) << "row " << i;
    EXPECT_EQ(data.velocities[i].vz, samples[i].vz) << "row " << i;
  }
}

TEST(CsvTest, PositionSchemaIsAutoDetected) {
  TempFile file("positions.csv");
  {
    std::ofstream out(file.str());
    out << "t,px,py,pz\n0,0.1,0.2,1.0\n0.01,0.11,0.21,1.01\n";
  }
  const CsvData data = read_samples_csv(file.str());
  ASSERT_EQ(data.kind, CsvKind::position);
  ASSERT_EQ(data.positions.size(), 2u);
  EXPECT_EQ(data.positions[1].py, 0.21);
}

TEST(CsvTest, ReportsRowAndColumnOnParseErrors) {
  TempFile file("bad.csv");
  auto write_and_expect = [&](const std::string& content, const std::string& needle) {
    {
      std::ofstream out(file.str());
      out << content;
    }
    try {
      read_samples_csv(file.str());
      FAIL() << "expected parse failure for: " << content;
    } catch (const std::runtime_error& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };

  write_and_expect("a,b\n1,2\n", "unrecognized header");
  write_and_expect("t,vx,vz\n0,1\n", "row 2");
  write_and_expect("t,vx,vz\n0,1,alpha\n", "column 'vz'");
  write_and_expect("t,vx,vz\n0,1,2\n0,1,2\n", "strictly increasing");
  write_and_expect("t,vx,vz\n", "no data rows");
  write_and_expect("", "empty file");
}

TEST(MetricsTest, IdenticalSequencesGiveZeros) {
  const auto a = reference_walk(0.02, 3, 4.0);
  const ErrorMetrics m = compute_metrics(a, a);
  EXPECT_EQ(m.mse_vx, 0.0);
  EXPECT_EQ(m.std_vx, 0.0);
  EXPECT_EQ(m.mse_vz, 0.0);
  EXPECT_EQ(m.std_vz, 0.0);
  EXPECT_EQ(m.n_samples, a.size());
}

TEST(MetricsTest, ConstantOffsetGivesSquaredBias) {
  const auto a = reference_walk(0.0, 3, 4.0);
  auto b = a;
  for (auto& s : b) s.vx += 0.3;
  const ErrorMetrics m = compute_metrics(a, b);
  EXPECT_NEAR(m.mse_vx, 0.09, 1e-12);
  EXPECT_NEAR(m.std_vx, 0.0, 1e-12);
  EXPECT_EQ(m.mse_vz, 0.0);
}

TEST(MetricsTest, SymmetricInArguments) {
  const auto a = reference_walk(0.05, 4, 4.0);
  const auto b = reference_walk(0.05, 5, 4.0);
  const ErrorMetrics ab = compute_metrics(a, b);
  const ErrorMetrics ba = compute_metrics(b, a);
  EXPECT_EQ(ab.mse_vx, ba.mse_vx);
  EXPECT_EQ(ab.std_vx, ba.std_vx);
  EXPECT_EQ(ab.mse_vz, ba.mse_vz);
  EXPECT_EQ(ab.std_vz, ba.std_vz);
}

TEST(MetricsTest, SineAgainstZeroAveragesToHalf) {
  std::vector<VelocitySample> measured, zero;
  for (int k = 0; k < 1000; ++k) { // 40 whole 1 Hz periods at 25 Hz
    const double t = k * 0.04;
    measured.push_back({t, std::sin(2.0 * std::numbers::pi * t), 0.0});
    zero.push_back({t, 0.0, 0.0});
  }
  const ErrorMetrics m = compute_metrics(measured, zero);
  EXPECT_NEAR(m.mse_vx, 0.5, 1e-9);
}

TEST(MetricsTest, RejectsMismatchedOrEmptyInput) {
  const auto a = reference_walk(0.0, 3, 4.0);
  auto b = a;
  b.pop_back();
  EXPECT_THROW(compute_metrics(a, b), std::invalid_argument);
  EXPECT_THROW(compute_metrics({}, {}), std::invalid_argument);
}

TEST(RunEstimateTest, TracksReferenceWalk) {
  CsvData data;
  data.kind = CsvKind::velocity;
  data.velocities = reference_walk(0.02, 11);
  const PipelineConfig cfg = parse_config_text("");
  const EstimateResult result = run_estimate(data, cfg);

  ASSERT_EQ(result.rows.size(), data.velocities.size());
  // Tail average of the frequency estimate should sit near 2.5 rad/s.
  double omega_sum = 0.0;
  int count = 0;
  bool gate_seen = false;
  for (const auto& row : result.rows) {
    if (row.t >= 30.0) {
      omega_sum += row.omega_hat;
      ++count;
    }
    gate_seen = gate_seen || row.gate_active;
  }
  EXPECT_NEAR(std::abs(omega_sum / count), 2.5, 0.05);
  EXPECT_TRUE(gate_seen);
  EXPECT_GT(result.metrics.n_samples, 0u);
  EXPECT_LT(result.metrics.mse_vz, 5e-3);
}

TEST(RunEstimateTest, AcceptsPositionInputThroughPreprocessing) {
  YoyoParams params;
  const double omega = 2.5, rate = 100.0;
  CsvData data;
  data.kind = CsvKind::position;
  for (int k = 0; k < 3000; ++k) {
    const double t = k / rate;
    const PointXZ p = position(params, omega * t);
    data.positions.push_back({t, p.x, 0.0, p.z});
  }
  const PipelineConfig cfg = parse_config_text("");
  const EstimateResult result = run_estimate(data, cfg, 15.0);

  double omega_sum = 0.0;
  int count = 0;
  for (const auto& row : result.rows) {
    if (row.t >= 20.0) {
      omega_sum += row.omega_hat;
      ++count;
    }
  }
  ASSERT_GT(count, 0);
  EXPECT_NEAR(std::abs(omega_sum / count), 2.5, 0.05);
}

TEST(RunEstimateTest, RejectsRateMismatchAndBadSkips) {
  CsvData data;
  data.kind = CsvKind::velocity;
  YoyoParams params;
  WalkProfile profile;
  profile.segments.push_back({10.0, 2.5});
  data.velocities = simulate_walk(params, profile, 0.02, 10.0, 0.0, 0.0, 1); // 50 Hz

  const PipelineConfig cfg = parse_config_text(""); // expects T = 0.04
  EXPECT_THROW(run_estimate(data, cfg), std::invalid_argument);

  data.velocities = simulate_walk(params, profile, 0.04, 10.0, 0.0, 0.0, 1);
  EXPECT_THROW(run_estimate(data, cfg, 11.0), std::invalid_argument); // skips everything
  EXPECT_THROW(run_estimate(data, cfg, -1.0), std::invalid_argument);
}

TEST(RunEstimateTest, SkipSecondsTrimsMetricsSpan) {
  CsvData data;
  data.kind = CsvKind::velocity;
  data.velocities = reference_walk(0.02, 11);
  const PipelineConfig cfg = parse_config_text("");
  const EstimateResult full = run_estimate(data, cfg);
  const EstimateResult tail = run_estimate(data, cfg, 30.0);
  EXPECT_EQ(full.metrics.n_samples, full.rows.size());
  EXPECT_LT(tail.metrics.n_samples, full.metrics.n_samples);

  // The skipped run must agree exactly with metrics recomputed over the
  // trimmed row span.
  const double t_begin = full.rows.front().t + 30.0;
  std::vector<VelocitySample> measured, estimated;
  for (const auto& row : full.rows) {
    if (row.t < t_begin) continue;
    measured.push_back({row.t, row.vx_meas, row.vz_meas});
    estimated.push_back({row.t, row.vx_hat, row.vz_hat});
  }
  const ErrorMetrics recomputed = compute_metrics(measured, estimated);
  EXPECT_EQ(tail.metrics.n_samples, recomputed.n_samples);
  EXPECT_EQ(tail.metrics.mse_vx, recomputed.mse_vx);
  EXPECT_EQ(tail.metrics.std_vx, recomputed.std_vx);
  EXPECT_EQ(tail.metrics.mse_vz, recomputed.mse_vz);
  EXPECT_EQ(tail.metrics.std_vz, recomputed.std_vz);
}

TEST(RunEstimateTest, EstimatesCsvHasStableLayout) {
  CsvData data;
  data.kind = CsvKind::velocity;
  data.velocities = reference_walk(0.02, 11, 10.0);
  const PipelineConfig cfg = parse_config_text("");
  const EstimateResult result = run_estimate(data, cfg);

  TempFile file("estimates.csv");
  write_estimates_csv(file.str(), result.rows);

  std::ifstream in(file.str());
  std::string header;
  ASSERT_TRUE(std::getline(in, header));
  EXPECT_EQ(header, "t,vx_meas,vz_meas,omega_hat,A0_hat,A1_hat,R_hat,r_hat,vx_hat,vz_hat,gate_active");
  std::string row;
  std::size_t rows = 0;
  while (std::getline(in, row)) {
    ++rows;
    EXPECT_TRUE(row.back() == '0' || row.back() == '1') << row;
  }
  EXPECT_EQ(rows, result.rows.size());
}

TEST(RunEstimateTest, MetricsRecordFormat) {
  ErrorMetrics m;
  m.mse_vx = 0.5;
  m.std_vx = 0.25;
  m.mse_vz = 0.125;
  m.std_vz = 0.0625;
  m.n_samples = 42;
  std::ostringstream out;
  write_metrics(out, m);
  EXPECT_EQ(out.str(),
            "mse_vx = 0.5\nstd_vx = 0.25\nmse_vz = 0.125\nstd_vz = 0.0625\nn_samples = 42\n");
}

TEST(BenchmarkTest, ReportIsSane) {
  const BenchmarkReport report = run_benchmark(100000);
  EXPECT_EQ(report.iterations, 100000u);
  EXPECT_GT(report.mean_us, 0.0);
  EXPECT_GE(report.p99_us, report.mean_us * 0.2); // loose: a rare multi-ms stall skews the mean
  EXPECT_TRUE(std::isfinite(report.checksum));

  // Comfortable margin over the 40 ms budget of a 25 Hz stream.
  EXPECT_GT(40000.0 / report.mean_us, 100.0);

  EXPECT_THROW(run_benchmark(1000), std::invalid_argument);
}

TEST(SimulateTest, SegmentFrequenciesRecoverableFromSpectrum) {
  YoyoParams params;
  WalkProfile profile;
  profile.segments.push_back({30.0, 3.0});
  profile.segments.push_back({30.0, 1.5});
  const auto samples = simulate_walk(params, profile, 0.04, 60.0, 0.0, 0.0, 1);
  ASSERT_EQ(samples.size(), 1500u);

  std::vector<double> first_half, second_half;
  for (const auto& s : samples) {
    (s.t < 30.0 ? first_half : second_half).push_back(s.vz);
  }
  const FrequencyBand band{0.15, 1.2};
  const double f1 = dft_peak(first_half, 25.0, band).frequency;
  const double f2 = dft_peak(second_half, 25.0, band).frequency;
  const double expected1 = 3.0 / (2.0 * std::numbers::pi);
  const double expected2 = 1.5 / (2.0 * std::numbers::pi);
  EXPECT_NEAR(f1, expected1, 0.05 * expected1);
  EXPECT_NEAR(f2, expected2, 0.05 * expected2);
}

}  // namespace
