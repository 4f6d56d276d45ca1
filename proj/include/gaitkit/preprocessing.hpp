#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "gaitkit/yoyo_model.hpp"

namespace gaitkit {

/// One tracked-point position: two horizontal axes plus the vertical axis.
struct PositionSample {
  double t = 0.0;  // seconds
  double px = 0.0; // meters
  double py = 0.0; // meters
  double pz = 0.0; // meters
};

struct PreprocessConfig {
  int sg_window = 11;        // odd, >= 5, samples
  int sg_order = 3;          // polynomial degree, >= 2, < sg_window
  double target_rate = 25.0; // Hz

  void validate() const {
    if (sg_window < 5 || sg_window % 2 == 0) {
      throw std::invalid_argument("PreprocessConfig: sg_window must be odd and >= 5");
    }
    if (sg_order < 2 || sg_order >= sg_window) {
      throw std::invalid_argument("PreprocessConfig: sg_order must be >= 2 and < sg_window");
    }
    if (!(target_rate > 0.0)) {
      throw std::invalid_argument("PreprocessConfig: target_rate must be positive");
    }
  }
};

namespace detail {

/// First-derivative convolution weights for one window, evaluated at sample
/// offset `eval` within the window: least-squares polynomial fit on the
/// scaled abscissa (j - eval)/half, differentiated at that point. Exact for
/// polynomials up to the fit degree, including one-sided windows.
inline std::vector<double> savgol_weights(int window, int order, int eval, double half,
                                          double dt) {
  Eigen::MatrixXd vand(window, order + 1);
  for (int j = 0; j < window; ++j) {
    const double x = (static_cast<double>(j) - eval) / half;
    double pw = 1.0;
    for (int c = 0; c <= order; ++c) {
      vand(j, c) = pw;
      pw *= x;
    }
  }
  Eigen::VectorXd pick = Eigen::VectorXd::Zero(order + 1);
  pick(1) = 1.0; // select the linear coefficient = derivative at the eval point
  const Eigen::VectorXd u = (vand.transpose() * vand).ldlt().solve(pick);
  const Eigen::VectorXd w = vand * u / (half * dt);
  return {w.data(), w.data() + w.size()};
}

}  // namespace detail

/// Savitzky-Golay first derivative of a uniformly sampled series. Interior
/// samples use centered windows; the first and last half-window use the
/// one-sided window evaluated at the sample's own offset, keeping
/// polynomial exactness at the boundaries.
inline std::vector<double> savgol_derivative(const std::vector<double>& series, double dt,
                                             const PreprocessConfig& config) {
  config.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("savgol_derivative: dt must be positive");
  const int n = static_cast<int>(series.size());
  const int window = config.sg_window;
  if (n < window) throw std::invalid_argument("savgol_derivative: series shorter than sg_window");

  const int half = window / 2;
  // One weight set per evaluation offset; interior points share offset = half.
  std::vector<std::vector<double>> weights(static_cast<std::size_t>(window));
  for (int e = 0; e < window; ++e) {
    weights[static_cast<std::size_t>(e)] =
        detail::savgol_weights(window, config.sg_order, e, static_cast<double>(half), dt);
  }

  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int start = std::clamp(i - half, 0, n - window);
    const auto& w = weights[static_cast<std::size_t>(i - start)];
    double acc = 0.0;
    for (int j = 0; j < window; ++j) acc += w[static_cast<std::size_t>(j)] * series[static_cast<std::size_t>(start + j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

struct UniformSeries {
  double start_time = 0.0;  // seconds
  double sample_time = 0.0; // seconds
  std::vector<double> values;
};

/// Linear interpolation onto the uniform grid start + k/target_rate,
/// anchored at the first input timestamp; never extrapolates past the
/// input span.
inline UniformSeries resample(const std::vector<double>& times, const std::vector<double>& values,
                              double target_rate) {
  if (times.empty() || times.size() != values.size()) {
    throw std::invalid_argument("resample: input empty or length mismatch");
  }
  if (!(target_rate > 0.0)) throw std::invalid_argument("resample: target_rate must be positive");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw std::invalid_argument("resample: timestamps must be strictly increasing");
    }
  }

  const double dt = 1.0 / target_rate;
  const double t0 = times.front();
  const double span = times.back() - t0;
  const auto count = static_cast<std::size_t>(std::floor(span / dt + 1e-9)) + 1;

  UniformSeries out{t0, dt, {}};
  out.values.reserve(count);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    while (seg + 2 < times.size() && times[seg + 1] <= t) ++seg;
    const double t_lo = times[seg];
    const double t_hi = times[seg + 1 < times.size() ? seg + 1 : seg];
    if (t_hi == t_lo) {
      out.values.push_back(values[seg]);
      continue;
    }
    const double alpha = (t - t_lo) / (t_hi - t_lo);
    out.values.push_back((1.0 - alpha) * values[seg] + alpha * values[seg + 1]);
  }
  return out;
}

inline double forward_speed(double vx_h, double vy_h) { return std::hypot(vx_h, vy_h); }

namespace detail {

/// Mean sample interval, rejecting any gap off by more than 1%.
inline double uniform_interval(const std::vector<double>& times) {
  if (times.size() < 2) throw std::invalid_argument("uniform_interval: need at least two samples");
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0)) throw std::invalid_argument("uniform_interval: timestamps must increase");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double gap = times[i] - times[i - 1];
    if (std::abs(gap - dt) > 0.01 * dt) {
      throw std::invalid_argument("uniform_interval: non-uniform sampling (gap deviates > 1%)");
    }
  }
  return dt;
}

}  // namespace detail

/// Positions to velocity measurements: differentiate each axis, take the
/// horizontal norm as forward speed, then resample both channels to the
/// filter rate. Differentiation happens before resampling so the fit sees
/// the full input rate.
inline std::vector<VelocitySample> preprocess(const std::vector<PositionSample>& positions,
                                              const PreprocessConfig& config) {
  config.validate();
  if (positions.size() < static_cast<std::size_t>(config.sg_window)) {
    throw std::invalid_argument("preprocess: fewer samples than sg_window");
  }

  std::vector<double> t, px, py, pz;
  t.reserve(positions.size());
  px.reserve(positions.size());
  py.reserve(positions.size());
  pz.reserve(positions.size());
  for (const auto& p : positions) {
    if (!std::isfinite(p.t) || !std::isfinite(p.px) || !std::isfinite(p.py) ||
        !std::isfinite(p.pz)) {
      throw std::invalid_argument("preprocess: non-finite position sample");
    }
    t.push_back(p.t);
    px.push_back(p.px);
    py.push_back(p.py);
    pz.push_back(p.pz);
  }

  const double dt = detail::uniform_interval(t);
  if (1.0 / dt < 2.0 * config.target_rate) {
    throw std::invalid_argument("preprocess: input rate below 2x target_rate");
  }

  const std::vector<double> dx = savgol_derivative(px, dt, config);
  const std::vector<double> dy = savgol_derivative(py, dt, config);
  const std::vector<double> dz = savgol_derivative(pz, dt, config);

  std::vector<double> vx(dx.size()), vz = dz;
  for (std::size_t i = 0; i < dx.size(); ++i) vx[i] = forward_speed(dx[i], dy[i]);

  const UniformSeries rx = resample(t, vx, config.target_rate);
  const UniformSeries rz = resample(t, vz, config.target_rate);

  std::vector<VelocitySample> out;
  out.reserve(rx.values.size());
  for (std::size_t k = 0; k < rx.values.size(); ++k) {
    out.push_back({rx.start_time + static_cast<double>(k) * rx.sample_time, rx.values[k],
                   rz.values[k]});
  }
  return out;
}

}  // namespace gaitkit
