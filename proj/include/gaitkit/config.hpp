#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "gaitkit/param_extraction.hpp"
#include "gaitkit/preprocessing.hpp"
#include "gaitkit/sinusoid_ekf.hpp"
#include "gaitkit/text_util.hpp"
#include "gaitkit/yoyo_model.hpp"

namespace gaitkit {

/// Everything one estimation run needs. R0/r0/omega0 seed both the filter's
/// initial state and the parameter tracker, keeping the two consistent.
struct PipelineConfig {
  EkfConfig ekf;
  ParamFilterConfig params;
  PreprocessConfig preprocess;
};

namespace detail {

inline double parse_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' has a non-numeric value '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(value)) {
    throw std::invalid_argument("config: key '" + key + "' has a non-numeric value '" + text + "'");
  }
  return value;
}

inline int parse_integer(const std::string& key, const std::string& text) {
  const double v = parse_number(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw std::invalid_argument("config: key '" + key + "' must be an integer");
  }
  return static_cast<int>(v);
}

/// key = value lines, '#' comments, blank lines ignored. Duplicate and
/// unknown keys are hard errors.
inline std::map<std::string, std::string> parse_key_values(std::istream& in,
                                                           const std::set<std::string>& known) {
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    }
    if (!known.count(key)) {
      throw std::invalid_argument("config: unknown key '" + key + "' (line " +
                                  std::to_string(line_no) + ")");
    }
    if (out.count(key)) {
      throw std::invalid_argument("config: duplicate key '" + key + "' (line " +
                                  std::to_string(line_no) + ")");
    }
    out.emplace(key, value);
  }
  return out;
}

}  // namespace detail

/// Parses the flat run configuration. Recognized keys (all optional; the
/// defaults reproduce the stock tuning):
///   q1..q4            process-noise diagonal
///   v1, v2            measurement-noise diagonal
///   p0_scale          prior covariance = p0_scale * identity
///   T                 sampling interval, seconds
///   omega0            initial discrete frequency, rad/sample
///   R0, r0            initial outer/inner radius, meters
///   n                 moving-average window, samples
///   mu_omega, mu_a0   observability gate thresholds
///   sg_window, sg_order, target_rate   preprocessing parameters
inline PipelineConfig parse_config_text(const std::string& text) {
  static const std::set<std::string> known = {
      "q1", "q2", "q3", "q4", "v1", "v2", "p0_scale", "T", "omega0", "R0", "r0",
      "n",  "mu_omega", "mu_a0", "sg_window", "sg_order", "target_rate"};
  std::istringstream in(text);
  const auto kv = detail::parse_key_values(in, known);

  auto number = [&kv](const char* key, double fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : detail::parse_number(key, it->second);
  };
  auto integer = [&kv](const char* key, int fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : detail::parse_integer(key, it->second);
  };

  PipelineConfig cfg;
  cfg.ekf.process_noise_diag << number("q1", 1e-5), number("q2", 1e-5), number("q3", 1e-3),
      number("q4", 1e-3);
  cfg.ekf.measurement_noise_diag << number("v1", 1e-2), number("v2", 1e-2);
  const double p0_scale = number("p0_scale", 1.0);
  if (!(p0_scale > 0.0)) throw std::invalid_argument("config: p0_scale must be positive");
  cfg.ekf.prior_covariance = p0_scale * EkfCovariance::Identity();
  cfg.ekf.sample_time = number("T", 0.04);

  const double omega0 = number("omega0", 0.1);
  const double outer0 = number("R0", 2.0);
  const double inner0 = number("r0", 0.2);
  cfg.ekf.initial_state = {inner0 * omega0, 0.0, omega0, outer0 * omega0};

  cfg.params.window = integer("n", 10);
  cfg.params.freq_threshold = number("mu_omega", 0.1);
  cfg.params.bias_threshold = number("mu_a0", 0.1);
  cfg.params.initial_outer = outer0;
  cfg.params.initial_inner = inner0;

  cfg.preprocess.sg_window = integer("sg_window", 11);
  cfg.preprocess.sg_order = integer("sg_order", 3);
  cfg.preprocess.target_rate = number("target_rate", 25.0);

  cfg.ekf.validate();
  cfg.params.validate();
  cfg.preprocess.validate();
  return cfg;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

/// Walk-profile file: optional `phase0 <radians>` line plus one
/// `segment <duration_s> <omega_rad_s>` line per cadence segment, applied
/// in order. '#' comments allowed.
inline WalkProfile parse_profile_text(const std::string& text) {
  WalkProfile profile;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool phase_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string tag;
    fields >> tag;
    if (tag == "phase0") {
      if (phase_seen) {
        throw std::invalid_argument("profile: duplicate phase0 (line " + std::to_string(line_no) +
                                    ")");
      }
      if (!(fields >> profile.initial_phase)) {
        throw std::invalid_argument("profile: phase0 needs a numeric value (line " +
                                    std::to_string(line_no) + ")");
      }
      phase_seen = true;
    } else if (tag == "segment") {
      ProfileSegment seg;
      if (!(fields >> seg.duration >> seg.omega)) {
        throw std::invalid_argument("profile: segment needs '<duration> <omega>' (line " +
                                    std::to_string(line_no) + ")");
      }
      profile.segments.push_back(seg);
    } else {
      throw std::invalid_argument("profile: unknown directive '" + tag + "' (line " +
                                  std::to_string(line_no) + ")");
    }
    std::string extra;
    if (fields >> extra) {
      throw std::invalid_argument("profile: trailing tokens (line " + std::to_string(line_no) +
                                  ")");
    }
  }
  profile.validate();
  return profile;
}

inline WalkProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("profile: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_profile_text(buf.str());
}

}  // namespace gaitkit
