#pragma once

// Exterior weather ingestion: uniformly sampled CSV series and the
// zero-order-hold preview served to the controller.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "phytotron/types.hpp"

namespace phyto {

struct WeatherSeries {
  double start_time = 0.0;       // [s]
  double sample_interval = 0.0;  // [s]
  std::vector<Disturbance> records;

  double end_time() const {
    return start_time + sample_interval * (records.empty() ? 0 : records.size() - 1);
  }
};

struct DisturbancePreview {
  std::vector<Disturbance> samples;  // d(t_k + i*dt), i = 0..N
  bool held_last = false;            // true if any query ran past the series end
};

inline constexpr const char* kWeatherCsvHeader = "time_s,T_out_C,C_out_kg_m3,H_out_kg_m3";

namespace detail {

inline double parse_field(const std::string& cell, const std::string& path, int lineno) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0')
    throw std::runtime_error(path + ":" + std::to_string(lineno) +
                             ": malformed numeric field '" + cell + "'");
  if (!std::isfinite(v))
    throw std::runtime_error(path + ":" + std::to_string(lineno) + ": non-finite value");
  return v;
}

}  // namespace detail

inline WeatherSeries load_weather_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weather file: " + path);

  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": no records");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kWeatherCsvHeader)
    throw std::runtime_error(path + ":1: expected header '" + std::string(kWeatherCsvHeader) +
                             "', got '" + line + "'");

  std::vector<double> times;
  WeatherSeries s;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    size_t pos = 0;
    while (true) {
      const size_t comma = line.find(',', pos);
      cells.push_back(line.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (cells.size() != 4)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 4 fields, got " +
                               std::to_string(cells.size()));
    const double t = detail::parse_field(cells[0], path, lineno);
    Disturbance d;
    d.T_out = detail::parse_field(cells[1], path, lineno);
    d.C_out = detail::parse_field(cells[2], path, lineno);
    d.H_out = detail::parse_field(cells[3], path, lineno);
    if (d.C_out < 0.0 || d.H_out < 0.0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": negative gas density");
    if (!times.empty() && t <= times.back())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": times must be strictly increasing");
    times.push_back(t);
    s.records.push_back(d);
  }
  if (s.records.empty()) throw std::runtime_error(path + ": no records");

  s.start_time = times.front();
  if (times.size() >= 2) {
    s.sample_interval = times[1] - times[0];
    for (size_t i = 2; i < times.size(); ++i) {
      const double dt = times[i] - times[i - 1];
      if (std::abs(dt - s.sample_interval) > 1e-9 * std::max(1.0, s.sample_interval))
        throw std::runtime_error(path + ":" + std::to_string(i + 2) +
                                 ": non-uniform sample spacing");
    }
  } else {
    s.sample_interval = 1.0;  // single record: interval is irrelevant
  }
  return s;
}

// Zero-order-hold sample at time t; holds the boundary records outside the span.
inline const Disturbance& sample_zoh(const WeatherSeries& s, double t, bool* past_end = nullptr) {
  const double idx_f = std::floor((t - s.start_time) / s.sample_interval);
  long idx = static_cast<long>(idx_f);
  if (idx < 0) idx = 0;
  const long last = static_cast<long>(s.records.size()) - 1;
  if (idx > last) {
    idx = last;
    if (past_end) *past_end = true;
  }
  return s.records[static_cast<size_t>(idx)];
}

// Preview d(t_k..t_k+N*dt). Queries past the series end hold the last record;
// a warning line goes to *warn (if given) the first time that happens.
inline DisturbancePreview preview(const WeatherSeries& s, double t_k, int N, double dt,
                                  std::ostream* warn = nullptr) {
  DisturbancePreview pv;
  pv.samples.reserve(static_cast<size_t>(N) + 1);
  for (int i = 0; i <= N; ++i) {
    bool past = false;
    pv.samples.push_back(sample_zoh(s, t_k + i * dt, &past));
    if (past && !pv.held_last) {
      pv.held_last = true;
      if (warn)
        *warn << "warning: weather preview at t=" << t_k + i * dt
              << " s is past the series end; holding last record\n";
    }
  }
  return pv;
}

}  // namespace phyto
