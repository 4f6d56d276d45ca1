#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace gaitkit {

/// Kinematic constants of one walker: the tracked point rides a curtate
/// cycloid traced by a small cylinder (radius r) rolling inside the motion
/// of a large one (radius R), offset z0 above the ground.
struct YoyoParams {
  double outer_radius = 2.0;    // R, meters
  double inner_radius = 0.2;    // r, meters
  double vertical_offset = 1.0; // z0, meters

  void validate() const {
    if (!(outer_radius > 0.0) || !(inner_radius > 0.0) || !(vertical_offset > 0.0)) {
      throw std::invalid_argument("YoyoParams: radii and vertical offset must be positive");
    }
    if (!(inner_radius < outer_radius)) {
      throw std::invalid_argument("YoyoParams: inner radius must be smaller than outer radius");
    }
  }
};

struct PointXZ {
  double x = 0.0;
  double z = 0.0;
};

struct VelocityXZ {
  double vx = 0.0;
  double vz = 0.0;
};

/// Timestamped forward/vertical velocity of the tracked point.
struct VelocitySample {
  double t = 0.0;  // seconds
  double vx = 0.0; // m/s
  double vz = 0.0; // m/s
};

/// Piecewise-constant cadence schedule. The cycloid angle is integrated
/// continuously across segment boundaries; times past the last segment
/// keep its angular rate.
struct ProfileSegment {
  double duration = 0.0; // seconds
  double omega = 0.0;    // rad/s, >= 0
};

struct WalkProfile {
  std::vector<ProfileSegment> segments;
  double initial_phase = 0.0; // radians

  void validate() const {
    if (segments.empty()) {
      throw std::invalid_argument("WalkProfile: at least one segment required");
    }
    for (const auto& seg : segments) {
      if (!(seg.duration > 0.0) || !std::isfinite(seg.duration)) {
        throw std::invalid_argument("WalkProfile: segment durations must be positive");
      }
      if (!(seg.omega >= 0.0) || !std::isfinite(seg.omega)) {
        throw std::invalid_argument("WalkProfile: segment omega must be >= 0");
      }
    }
  }

  double total_duration() const {
    double sum = 0.0;
    for (const auto& seg : segments) sum += seg.duration;
    return sum;
  }

  double omega_at(double t) const {
    double acc = 0.0;
    for (const auto& seg : segments) {
      acc += seg.duration;
      if (t < acc) return seg.omega;
    }
    return segments.back().omega;
  }
};

inline PointXZ position(const YoyoParams& p, double theta) {
  return {p.outer_radius * theta + p.inner_radius * std::sin(theta),
          p.vertical_offset + p.inner_radius * std::cos(theta)};
}

inline VelocityXZ velocity(const YoyoParams& p, double omega, double theta) {
  return {p.outer_radius * omega + p.inner_radius * omega * std::cos(theta),
          -p.inner_radius * omega * std::sin(theta)};
}

/// Integrates the cycloid angle over a cadence profile and emits velocity
/// samples at a fixed interval, optionally perturbed by independent
/// zero-mean Gaussian noise per axis. Deterministic for a fixed seed.
inline std::vector<VelocitySample> simulate_walk(const YoyoParams& params,
                                                 const WalkProfile& profile,
                                                 double sample_time, double duration,
                                                 double noise_std_vx, double noise_std_vz,
                                                 std::uint64_t seed) {
  params.validate();
  profile.validate();
  if (!(sample_time > 0.0) || !(duration > 0.0)) {
    throw std::invalid_argument("simulate_walk: sample_time and duration must be positive");
  }
  if (!std::isfinite(noise_std_vx) || !std::isfinite(noise_std_vz) ||
      noise_std_vx < 0.0 || noise_std_vz < 0.0) {
    throw std::invalid_argument("simulate_walk: noise std must be finite and non-negative");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit_gauss(0.0, 1.0);

  const auto n = static_cast<std::size_t>(std::llround(duration / sample_time));
  std::vector<VelocitySample> out;
  out.reserve(n);

  double theta = profile.initial_phase;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * sample_time;
    const double omega = profile.omega_at(t);
    VelocityXZ v = velocity(params, omega, theta);
    if (noise_std_vx > 0.0) v.vx += noise_std_vx * unit_gauss(rng);
    if (noise_std_vz > 0.0) v.vz += noise_std_vz * unit_gauss(rng);
    out.push_back({t, v.vx, v.vz});
    theta += omega * sample_time;
  }
  return out;
}

}  // namespace gaitkit
