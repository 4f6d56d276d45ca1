#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitkit/preprocessing.hpp"
#include "gaitkit/text_util.hpp"
#include "gaitkit/yoyo_model.hpp"

namespace gaitkit {

namespace detail {

/// Shortest round-trippable decimal form of a double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_csv_number(const std::string& path, int row, const std::string& column,
                               const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (used != text.size() || text.empty() || !std::isfinite(value)) {
    throw std::runtime_error(path + ": row " + std::to_string(row) + ", column '" + column +
                             "': bad number '" + text + "'");
  }
  return value;
}

}  // namespace detail

enum class CsvKind { velocity, position };

/// One parsed input file: either velocity rows (t,vx,vz) or position rows
/// (t,px,py,pz), decided by the header.
struct CsvData {
  CsvKind kind = CsvKind::velocity;
  std::vector<VelocitySample> velocities;
  std::vector<PositionSample> positions;
};

/// Reads either input schema, auto-detected from the header line.
/// Timestamps must be strictly increasing; parse failures report row and
/// column.
inline CsvData read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");

  // Tolerate a UTF-8 byte-order mark before the header.
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  auto header = detail::split_fields(line);

  CsvData data;
  std::vector<std::string> columns;
  if (header == std::vector<std::string>{"t", "vx", "vz"}) {
    data.kind = CsvKind::velocity;
    columns = {"t", "vx", "vz"};
  } else if (header == std::vector<std::string>{"t", "px", "py", "pz"}) {
    data.kind = CsvKind::position;
    columns = {"t", "px", "py", "pz"};
  } else {
    throw std::runtime_error(path + ": unrecognized header (expected 't,vx,vz' or 't,px,py,pz')");
  }

  double prev_t = 0.0;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line);
    if (fields.size() != columns.size()) {
      throw std::runtime_error(path + ": row " + std::to_string(row) + ": expected " +
                               std::to_string(columns.size()) + " fields, got " +
                               std::to_string(fields.size()));
    }
    const double t = detail::parse_csv_number(path, row, columns[0], fields[0]);
    const bool first = data.velocities.empty() && data.positions.empty();
    if (!first && !(t > prev_t)) {
      throw std::runtime_error(path + ": row " + std::to_string(row) +
                               ": timestamps must be strictly increasing");
    }
    prev_t = t;
    if (data.kind == CsvKind::velocity) {
      data.velocities.push_back({t, detail::parse_csv_number(path, row, "vx", fields[1]),
                                 detail::parse_csv_number(path, row, "vz", fields[2])});
    } else {
      data.positions.push_back({t, detail::parse_csv_number(path, row, "px", fields[1]),
                                detail::parse_csv_number(path, row, "py", fields[2]),
                                detail::parse_csv_number(path, row, "pz", fields[3])});
    }
  }
  if (data.velocities.empty() && data.positions.empty()) {
    throw std::runtime_error(path + ": no data rows");
  }
  return data;
}

inline void write_velocity_csv(const std::string& path, const std::vector<VelocitySample>& samples) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "t,vx,vz\n";
  for (const auto& s : samples) {
    out << detail::format_double(s.t) << ',' << detail::format_double(s.vx) << ','
        << detail::format_double(s.vz) << '\n';
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace gaitkit
