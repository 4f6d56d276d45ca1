#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace gaitkit {

/// State of the biased-sinusoid tracker, all in per-sample units: the
/// forward-velocity displacement per sample is bias + osc_cos, and the
/// vertical one is -osc_sin. `frequency` is in radians per sample.
struct EkfState {
  double osc_cos = 0.0;   // in-phase oscillation component, m/sample
  double osc_sin = 0.0;   // quadrature oscillation component, m/sample
  double frequency = 0.0; // discrete angular frequency, rad/sample
  double bias = 0.0;      // forward-velocity bias, m/sample

  double amplitude() const { return std::hypot(osc_cos, osc_sin); }

  Eigen::Vector4d vec() const { return {osc_cos, osc_sin, frequency, bias}; }
  static EkfState from_vec(const Eigen::Vector4d& v) { return {v[0], v[1], v[2], v[3]}; }
};

using EkfCovariance = Eigen::Matrix4d;

/// One velocity measurement scaled to per-sample displacements
/// (velocity in m/s times the sampling interval).
struct Measurement {
  double vx = 0.0; // m/sample
  double vz = 0.0; // m/sample
};

/// Design band for the discrete frequency: the sampling interval should be
/// chosen so the expected rad-per-sample frequency lands inside it. Used as
/// a diagnostic only, never enforced during filtering.
inline constexpr double kFrequencyBandLow = 0.05;
inline constexpr double kFrequencyBandHigh = 0.5;

struct EkfConfig {
  Eigen::Vector4d process_noise_diag{1e-5, 1e-5, 1e-3, 1e-3}; // Q diagonal
  Eigen::Vector2d measurement_noise_diag{1e-2, 1e-2};         // V diagonal
  EkfCovariance prior_covariance = EkfCovariance::Identity(); // P0
  // Seeded from a 2 m / 0.2 m walker at 0.1 rad/sample; spelled as the
  // products so this stays bit-identical with configs derived from
  // (omega0, R0, r0) triples.
  EkfState initial_state{0.2 * 0.1, 0.0, 0.1, 2.0 * 0.1};
  double sample_time = 0.04; // seconds

  void validate() const {
    if (!(sample_time > 0.0)) {
      throw std::invalid_argument("EkfConfig: sample_time must be positive");
    }
    if (!(process_noise_diag.minCoeff() > 0.0)) {
      throw std::invalid_argument("EkfConfig: process noise diagonal must be positive");
    }
    if (!(measurement_noise_diag.minCoeff() > 0.0)) {
      throw std::invalid_argument("EkfConfig: measurement noise diagonal must be positive");
    }
    Eigen::SelfAdjointEigenSolver<EkfCovariance> es(prior_covariance);
    if (es.info() != Eigen::Success || !(es.eigenvalues().minCoeff() > 0.0)) {
      throw std::invalid_argument("EkfConfig: prior covariance must be positive definite");
    }
  }
};

/// Stock tuning: identity prior, Q = diag(1e-5, 1e-5, 1e-3, 1e-3),
/// V = diag(1e-2, 1e-2), 25 Hz sampling, and an initial state consistent
/// with a 2 m / 0.2 m walker at 0.1 rad/sample (so initial bias/frequency
/// recovers the 2 m outer radius).
inline EkfConfig default_config() {
  EkfConfig cfg;
  constexpr double omega0 = 0.1;        // rad/sample
  constexpr double outer0 = 2.0;        // m
  constexpr double inner0 = 0.2;        // m
  cfg.initial_state = {inner0 * omega0, 0.0, omega0, outer0 * omega0};
  return cfg;
}

/// Advances the state one sample: the oscillation pair rotates by the
/// current frequency; frequency and bias are modeled constant.
inline EkfState transition(const EkfState& s) {
  const double c = std::cos(s.frequency);
  const double sn = std::sin(s.frequency);
  return {s.osc_cos * c - s.osc_sin * sn, s.osc_cos * sn + s.osc_sin * c, s.frequency, s.bias};
}

inline Eigen::Matrix4d transition_jacobian(const EkfState& s) {
  const double c = std::cos(s.frequency);
  const double sn = std::sin(s.frequency);
  Eigen::Matrix4d f;
  f << c, -sn, -s.osc_cos * sn - s.osc_sin * c, 0.0,
       sn, c, s.osc_cos * c - s.osc_sin * sn, 0.0,
       0.0, 0.0, 1.0, 0.0,
       0.0, 0.0, 0.0, 1.0;
  return f;
}

inline std::pair<EkfState, EkfCovariance> predict(const EkfState& state, const EkfCovariance& cov,
                                                  const EkfConfig& config) {
  const Eigen::Matrix4d f = transition_jacobian(state);
  EkfCovariance p = f * cov * f.transpose();
  p.diagonal() += config.process_noise_diag;
  p = 0.5 * (p + p.transpose()).eval();
  return {transition(state), p};
}

struct UpdateResult {
  EkfState state;
  EkfCovariance covariance;
  Eigen::Vector2d innovation;
};

/// Measurement update with the fixed linear model: vx couples to the
/// in-phase component plus the bias, vz to minus the quadrature component.
/// Joseph-form covariance update keeps P positive semidefinite; the 2x2
/// innovation covariance is inverted in closed form behind a conditioning
/// guard (Frobenius-norm condition estimate), the only inversion here.
inline UpdateResult update(const EkfState& state, const EkfCovariance& cov,
                           const Measurement& z, const EkfConfig& config) {
  Eigen::Matrix<double, 2, 4> h;
  h << 1.0, 0.0, 0.0, 1.0,
       0.0, -1.0, 0.0, 0.0;

  Eigen::Matrix2d s = h * cov * h.transpose();
  s.diagonal() += config.measurement_noise_diag;

  const double det = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
  const double frob_sq = s.squaredNorm();
  if (!(std::abs(det) > 0.0) || frob_sq / std::abs(det) > 1e12) {
    throw std::runtime_error("update: innovation covariance numerically singular");
  }
  Eigen::Matrix2d s_inv;
  s_inv << s(1, 1), -s(0, 1), -s(1, 0), s(0, 0);
  s_inv /= det;

  const Eigen::Vector2d innovation =
      Eigen::Vector2d(z.vx, z.vz) - h * state.vec();
  const Eigen::Matrix<double, 4, 2> gain = cov * h.transpose() * s_inv;

  const Eigen::Vector4d posterior = state.vec() + gain * innovation;
  const Eigen::Matrix4d ikh = Eigen::Matrix4d::Identity() - gain * h;
  EkfCovariance p = ikh * cov * ikh.transpose() +
                    gain * config.measurement_noise_diag.asDiagonal() * gain.transpose();
  p = 0.5 * (p + p.transpose()).eval();

  return {EkfState::from_vec(posterior), p, innovation};
}

struct StepResult {
  EkfState state;
  EkfCovariance covariance;
  Eigen::Vector2d innovation;
  bool frequency_in_band = true; // |frequency| inside the design band after the update
};

/// Predict-then-update composition; the band flag is diagnostic only.
inline StepResult step(const EkfState& state, const EkfCovariance& cov, const Measurement& z,
                       const EkfConfig& config) {
  const auto [prior_state, prior_cov] = predict(state, cov, config);
  UpdateResult u = update(prior_state, prior_cov, z, config);
  const double freq_mag = std::abs(u.state.frequency);
  const bool in_band = freq_mag > kFrequencyBandLow && freq_mag < kFrequencyBandHigh;
  return {u.state, u.covariance, u.innovation, in_band};
}

}  // namespace gaitkit
