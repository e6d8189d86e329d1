#pragma once

// Circadian reference trajectories: one cosine cycle per day for light,
// temperature and CO2, zero reference for every other input.

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "phytotron/types.hpp"

namespace phyto {

// Amplitudes/offsets of the daily cycle; defaults give T in [17,23] degC,
// C in [7.25e-4, 1.085e-3] kg/m^3 and LED drives in [0,100] %.
struct ReferenceConfig {
  double period_s = 86400.0;
  double T_mean = 20.0;      // [degC]
  double T_amp = 3.0;        // [degC]
  double C_mean = 9.05e-4;   // [kg/m^3]
  double C_amp = 1.8e-4;     // [kg/m^3]
  double led_mean = 50.0;    // [%]
  double led_amp = 50.0;     // [%]
};

struct ReferenceSample {
  double T_ref = 0.0;
  double C_ref = 0.0;
  std::array<double, kNumInputs> u_ref{};  // ControlInput ordering
};

// Reference at wall-clock time t [s since midnight]; trough at midnight,
// peak at noon, period one day.
inline ReferenceSample reference_at(double t, const ReferenceConfig& cfg = {}) {
  const double c = std::cos(2.0 * std::numbers::pi * t / cfg.period_s);
  ReferenceSample s;
  s.T_ref = cfg.T_mean - cfg.T_amp * c;
  s.C_ref = cfg.C_mean - cfg.C_amp * c;
  const double led = cfg.led_mean - cfg.led_amp * c;
  for (int j = 6; j < kNumInputs; ++j) s.u_ref[j] = led;
  return s;
}

// N+1 samples covering one shooting horizon starting at t_k.
inline std::vector<ReferenceSample> reference_window(double t_k, int N, double dt,
                                                     const ReferenceConfig& cfg = {}) {
  std::vector<ReferenceSample> w;
  w.reserve(static_cast<size_t>(N) + 1);
  for (int i = 0; i <= N; ++i) w.push_back(reference_at(t_k + i * dt, cfg));
  return w;
}

}  // namespace phyto
