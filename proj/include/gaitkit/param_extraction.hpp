#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "gaitkit/sinusoid_ekf.hpp"
#include "gaitkit/yoyo_model.hpp"

namespace gaitkit {

/// Below this oscillation amplitude (m/sample) the phase direction is
/// meaningless and reconstruction falls back to the bias-only estimate.
inline constexpr double kAmplitudeEpsilon = 1e-9;

struct ParamFilterConfig {
  int window = 10;              // moving-average length over accepted estimates
  double freq_threshold = 0.1;  // frequency observability gate, rad/sample
  double bias_threshold = 0.1;  // bias observability gate, m/sample
  double initial_outer = 2.0;   // starting outer-radius estimate, m
  double initial_inner = 0.2;   // starting inner-radius estimate, m
  // Gate on |frequency| instead of the signed value, admitting the
  // negative-frequency equilibrium. Off by default: the signed gate means a
  // filter settled at negative frequency holds its radii rather than update
  // them from a mirrored state.
  bool gate_on_frequency_magnitude = false;

  void validate() const {
    if (window < 1) throw std::invalid_argument("ParamFilterConfig: window must be >= 1");
    if (!(freq_threshold > 0.0) || !(bias_threshold > 0.0)) {
      throw std::invalid_argument("ParamFilterConfig: gate thresholds must be positive");
    }
    if (!(initial_outer > 0.0) || !(initial_inner > 0.0)) {
      throw std::invalid_argument("ParamFilterConfig: initial radii must be positive");
    }
  }
};

/// Smooths instantaneous radius estimates (bias/frequency and
/// amplitude/frequency) behind an observability gate. While the gate fails
/// the outputs hold their previous values exactly and the averaging history
/// is left untouched, so a long standstill cannot dilute it.
class ParamTracker {
 public:
  explicit ParamTracker(const ParamFilterConfig& config) : config_(config) {
    config_.validate();
    outer_ = config_.initial_outer;
    inner_ = config_.initial_inner;
    history_outer_.assign(static_cast<std::size_t>(config_.window), outer_);
    history_inner_.assign(static_cast<std::size_t>(config_.window), inner_);
  }

  void update(const EkfState& state) {
    ++sample_index_;
    const double freq =
        config_.gate_on_frequency_magnitude ? std::abs(state.frequency) : state.frequency;
    gate_active_ = sample_index_ > static_cast<std::size_t>(config_.window) &&
                   freq > config_.freq_threshold && state.bias > config_.bias_threshold;
    if (!gate_active_) return;

    const double inst_outer = state.bias / freq;
    const double inst_inner = state.amplitude() / freq;
    outer_ = (sum(history_outer_) + inst_outer) / (config_.window + 1);
    inner_ = (sum(history_inner_) + inst_inner) / (config_.window + 1);
    history_outer_[head_] = outer_;
    history_inner_[head_] = inner_;
    head_ = (head_ + 1) % history_outer_.size();
  }

  double outer_radius() const { return outer_; }
  double inner_radius() const { return inner_; }
  bool gate_active() const { return gate_active_; }
  std::size_t sample_index() const { return sample_index_; }

 private:
  static double sum(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
  }

  ParamFilterConfig config_;
  double outer_ = 0.0;
  double inner_ = 0.0;
  std::vector<double> history_outer_;
  std::vector<double> history_inner_;
  std::size_t head_ = 0;
  std::size_t sample_index_ = 0;
  bool gate_active_ = false;
};

struct VelocityDecomposition {
  double forward = 0.0; // low-frequency forward component, m/s
  double osc_vx = 0.0;  // oscillatory forward component, m/s
  double osc_vz = 0.0;  // oscillatory vertical component, m/s
  bool amplitude_degenerate = false;
};

struct VelocityEstimate {
  double vx = 0.0; // m/s
  double vz = 0.0; // m/s
  bool amplitude_degenerate = false;
};

/// Splits the model velocity into the forward (bias) part and the
/// oscillatory pair, rescaled from per-sample units to m/s. The oscillation
/// direction comes from the filter's phase estimate; the magnitudes come
/// from the smoothed radii.
inline VelocityDecomposition decompose(const EkfState& state, const ParamTracker& tracker,
                                       double sample_time) {
  if (!(sample_time > 0.0)) throw std::invalid_argument("decompose: sample_time must be positive");
  VelocityDecomposition d;
  d.forward = tracker.outer_radius() * state.frequency / sample_time;
  const double amp = state.amplitude();
  if (amp <= kAmplitudeEpsilon) {
    d.amplitude_degenerate = true;
    return d;
  }
  const double osc_scale = tracker.inner_radius() * state.frequency / (amp * sample_time);
  d.osc_vx = osc_scale * state.osc_cos;
  d.osc_vz = -osc_scale * state.osc_sin;
  return d;
}

/// Full velocity estimate; by construction the exact sum of the
/// decompose() parts.
inline VelocityEstimate reconstruct_velocity(const EkfState& state, const ParamTracker& tracker,
                                             double sample_time) {
  const VelocityDecomposition d = decompose(state, tracker, sample_time);
  return {d.forward + d.osc_vx, d.osc_vz, d.amplitude_degenerate};
}

}  // namespace gaitkit
