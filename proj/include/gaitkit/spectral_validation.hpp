#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitkit/yoyo_model.hpp"

namespace gaitkit {

/// Search band for the dominant step frequency; the default brackets typical
/// human cadence (1-2 Hz) with margin on both sides.
struct FrequencyBand {
  double low = 0.5;  // Hz
  double high = 3.0; // Hz
};

struct DftPeak {
  double frequency = 0.0; // Hz
  double amplitude = 0.0; // sinusoid amplitude, signal units
  double phase = 0.0;     // delay p in A*cos(2*pi*f*t - p), radians in (-pi, pi]
  // Peak bin magnitude over the median in-band magnitude; a crude
  // oscillation-vs-noise contrast used by validate_recording.
  double band_contrast = 0.0;
};

namespace detail {

struct BinValue {
  double re = 0.0; // sum of x[n]*cos(w n)
  double im = 0.0; // sum of x[n]*sin(w n)
  double magnitude() const { return std::hypot(re, im); }
};

/// Direct correlation of the (already mean-removed) series against one
/// angular frequency in radians per sample.
inline BinValue correlate(const std::vector<double>& x, double omega) {
  BinValue b;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double a = omega * static_cast<double>(n);
    b.re += x[n] * std::cos(a);
    b.im += x[n] * std::sin(a);
  }
  return b;
}

inline std::vector<double> mean_removed(const std::vector<double>& series) {
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(series.size());
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) out[i] = series[i] - mean;
  return out;
}

}  // namespace detail

/// Dominant in-band spectral peak of a uniformly sampled series. The series
/// mean is removed internally so a velocity bias cannot mask the
/// oscillation. The winning bin is refined by quadratic interpolation over
/// the log-magnitudes of its two neighbors (sub-bin accuracy on long
/// recordings); the phase is read at the refined frequency.
inline DftPeak dft_peak(const std::vector<double>& series, double rate, FrequencyBand band) {
  if (!(rate > 0.0)) throw std::invalid_argument("dft_peak: rate must be positive");
  if (!(band.low > 0.0) || !(band.high > band.low)) {
    throw std::invalid_argument("dft_peak: band must satisfy 0 < low < high");
  }
  const auto n = series.size();
  const double min_len = 2.0 * rate / band.low; // two periods of the slowest band frequency
  if (static_cast<double>(n) < min_len) {
    throw std::invalid_argument("dft_peak: series shorter than two periods of band.low");
  }

  const std::vector<double> x = detail::mean_removed(series);
  const double nd = static_cast<double>(n);

  auto bin_lo = static_cast<std::size_t>(std::ceil(band.low * nd / rate));
  auto bin_hi = static_cast<std::size_t>(std::floor(band.high * nd / rate));
  bin_lo = std::max<std::size_t>(bin_lo, 1);
  bin_hi = std::min(bin_hi, n / 2);
  if (bin_hi < bin_lo) throw std::invalid_argument("dft_peak: band contains no DFT bins");

  std::vector<double> mags;
  mags.reserve(bin_hi - bin_lo + 1);
  std::size_t peak_bin = bin_lo;
  double peak_mag = -1.0;
  const double bin_step = 2.0 * std::numbers::pi / nd; // rad/sample per bin
  for (std::size_t k = bin_lo; k <= bin_hi; ++k) {
    const double mag = detail::correlate(x, bin_step * static_cast<double>(k)).magnitude();
    mags.push_back(mag);
    if (mag > peak_mag) {
      peak_mag = mag;
      peak_bin = k;
    }
  }
  if (peak_mag < 1e-12) throw std::runtime_error("dft_peak: no oscillatory content in band");

  std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2),
                   mags.end());
  const double median_mag = mags[mags.size() / 2];

  // Quadratic fit through the log-magnitudes of the peak bin and its
  // immediate neighbors (which may lie just outside the band).
  double delta = 0.0;
  if (peak_bin >= 1 && peak_bin + 1 <= n / 2) {
    const double ml = detail::correlate(x, bin_step * static_cast<double>(peak_bin - 1)).magnitude();
    const double mr = detail::correlate(x, bin_step * static_cast<double>(peak_bin + 1)).magnitude();
    if (ml > 1e-18 && mr > 1e-18) {
      const double ll = std::log(ml);
      const double lc = std::log(peak_mag);
      const double lr = std::log(mr);
      const double denom = ll - 2.0 * lc + lr;
      if (std::abs(denom) > 1e-12) {
        delta = std::clamp(0.5 * (ll - lr) / denom, -0.5, 0.5);
      }
    }
  }

  const double refined_bin = static_cast<double>(peak_bin) + delta;
  const detail::BinValue at_peak = detail::correlate(x, bin_step * refined_bin);

  DftPeak out;
  out.frequency = refined_bin * rate / nd;
  out.amplitude = 2.0 * at_peak.magnitude() / nd;
  out.phase = std::atan2(at_peak.im, at_peak.re);
  out.band_contrast =
      median_mag > 0.0 ? peak_mag / median_mag : std::numeric_limits<double>::infinity();
  return out;
}

namespace detail {

/// Wraps degrees to (-180, 180].
inline double wrap_degrees(double deg) {
  double w = std::fmod(deg + 180.0, 360.0);
  if (w <= 0.0) w += 360.0;
  return w - 180.0;
}

}  // namespace detail

/// Phase of the vertical channel minus phase of the forward channel at
/// their common dominant frequency, in degrees wrapped to (-180, 180].
/// Both phases are read at the same refined frequency so bin quantization
/// cancels. A forward cosine paired with a vertical minus-sine comes out
/// at -90 degrees.
inline double phase_offset(const std::vector<double>& vx_series,
                           const std::vector<double>& vz_series, double rate,
                           FrequencyBand band = {}) {
  if (vx_series.size() != vz_series.size()) {
    throw std::invalid_argument("phase_offset: series lengths differ");
  }
  const DftPeak px = dft_peak(vx_series, rate, band);
  const DftPeak pz = dft_peak(vz_series, rate, band);
  if (std::abs(px.frequency - pz.frequency) > 0.1 * std::max(px.frequency, pz.frequency)) {
    throw std::runtime_error("phase_offset: no common dominant frequency");
  }

  const double fc = 0.5 * (px.frequency + pz.frequency);
  const double omega = 2.0 * std::numbers::pi * fc / rate;
  const detail::BinValue bx = detail::correlate(detail::mean_removed(vx_series), omega);
  const detail::BinValue bz = detail::correlate(detail::mean_removed(vz_series), omega);
  const double phase_x = std::atan2(bx.im, bx.re);
  const double phase_z = std::atan2(bz.im, bz.re);
  return detail::wrap_degrees((phase_z - phase_x) * 180.0 / std::numbers::pi);
}

struct SpectrumReport {
  double peak_frequency = 0.0;   // Hz
  double peak_amplitude = 0.0;   // signal units
  double phase_offset_deg = 0.0; // degrees in (-180, 180]
  double resolution = 0.0;       // Hz per DFT bin
};

struct ValidationResult {
  bool pass = false;
  std::string reason; // empty on pass
  SpectrumReport report;
};

/// Minimum peak-to-median contrast to call a band peak a real oscillation
/// rather than a noise excursion.
inline constexpr double kNoiseFloorContrast = 3.0;
/// Model check: vertical oscillation must lag (-90 degrees) the forward one
/// within this tolerance.
inline constexpr double kPhaseTolerance = 15.0;

/// Offline model check on one recording: both channels must show a common
/// dominant in-band frequency well above the noise floor, with the
/// forward/vertical phase offset at -90 degrees within tolerance. Spectral
/// shortfalls surface as a failing result; malformed input throws.
inline ValidationResult validate_recording(const std::vector<VelocitySample>& samples,
                                           FrequencyBand band = {}) {
  if (samples.size() < 2) throw std::invalid_argument("validate_recording: too few samples");
  if (samples.back().t - samples.front().t < 10.0) {
    throw std::invalid_argument("validate_recording: need at least 10 s of data");
  }
  std::vector<double> t, vx, vz;
  t.reserve(samples.size());
  vx.reserve(samples.size());
  vz.reserve(samples.size());
  for (const auto& s : samples) {
    t.push_back(s.t);
    vx.push_back(s.vx);
    vz.push_back(s.vz);
  }
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs(t[i] - t[i - 1] - dt) > 0.01 * dt) {
      throw std::invalid_argument("validate_recording: non-uniform sampling");
    }
  }
  const double rate = 1.0 / dt;

  ValidationResult res;
  res.report.resolution = rate / static_cast<double>(samples.size());

  DftPeak px, pz;
  try {
    px = dft_peak(vx, rate, band);
    pz = dft_peak(vz, rate, band);
  } catch (const std::runtime_error& e) {
    res.reason = e.what();
    return res;
  }
  if (px.band_contrast < kNoiseFloorContrast || pz.band_contrast < kNoiseFloorContrast) {
    res.reason = "no oscillatory content (in-band peak below 3x noise floor)";
    return res;
  }
  if (std::abs(px.frequency - pz.frequency) > 0.1 * std::max(px.frequency, pz.frequency)) {
    res.reason = "no common dominant frequency between vx and vz";
    return res;
  }

  res.report.peak_frequency = 0.5 * (px.frequency + pz.frequency);
  res.report.peak_amplitude = std::max(px.amplitude, pz.amplitude);
  res.report.phase_offset_deg = phase_offset(vx, vz, rate, band);
  if (std::abs(res.report.phase_offset_deg - (-90.0)) > kPhaseTolerance) {
    res.reason = "phase offset outside -90 +/- 15 degrees";
    return res;
  }
  res.pass = true;
  return res;
}

}  // namespace gaitkit
