#pragma once

#include <array>
#include <cstddef>

namespace phyto {

inline constexpr int kNumStates = 7;
inline constexpr int kNumInputs = 10;
inline constexpr int kNumDisturbances = 3;

// Chamber state x. Temperatures in degC, gas densities in kg m^-3,
// tank levels in kg, biomass as dry matter per growing area in kg m^-2.
struct ChamberState {
  double T = 20.0;      // air temperature [degC]
  double C = 9.0e-4;    // CO2 density [kg m^-3]
  double H = 9.0e-3;    // water vapor density [kg m^-3]
  double W_sto = 0.15;  // storage tank level [kg]
  double W_med = 0.65;  // growing medium water [kg]
  double W_ovf = 0.30;  // overflow tank level [kg]
  double B = 0.05;      // crop dry matter [kg m^-2]

  std::array<double, kNumStates> to_array() const {
    return {T, C, H, W_sto, W_med, W_ovf, B};
  }
  static ChamberState from_array(const std::array<double, kNumStates>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6]};
  }
};

// Control input u. u_T is the TEC drive in [-100,100]; u_V, u_H and the
// three pump switches are binary on the real hardware and relaxed to [0,1]
// inside the optimizer; LED channel drives are percentages in [0,100].
struct ControlInput {
  double u_T = 0.0;   // TEC drive [%], sign selects heating/cooling
  double u_V = 0.0;   // ventilator [0/1]
  double u_H = 0.0;   // humidifier [0/1]
  double u_W1 = 0.0;  // fresh-water pump into storage tank [0/1]
  double u_W2 = 0.0;  // irrigation pump into growing medium [0/1]
  double u_W3 = 0.0;  // overflow drain pump [0/1]
  double u_I1 = 0.0;  // LED channel drives [%]
  double u_I2 = 0.0;
  double u_I3 = 0.0;
  double u_I4 = 0.0;

  std::array<double, kNumInputs> to_array() const {
    return {u_T, u_V, u_H, u_W1, u_W2, u_W3, u_I1, u_I2, u_I3, u_I4};
  }
  static ControlInput from_array(const std::array<double, kNumInputs>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8], a[9]};
  }
};

// Indices of the binary actuators inside ControlInput::to_array().
inline constexpr std::array<int, 5> kBinaryInputIndices = {1, 2, 3, 4, 5};

// Exogenous conditions outside the chamber.
struct Disturbance {
  double T_out = 16.0;    // outside temperature [degC]
  double C_out = 8.0e-4;  // outside CO2 density [kg m^-3]
  double H_out = 9.0e-3;  // outside vapor density [kg m^-3]

  std::array<double, kNumDisturbances> to_array() const {
    return {T_out, C_out, H_out};
  }
  static Disturbance from_array(const std::array<double, kNumDisturbances>& a) {
    return {a[0], a[1], a[2]};
  }
};

// Hard operating box for the state (checked, never silently clamped).
struct StateBox {
  std::array<double, kNumStates> lo = {5.0,  1.96e-6, 4.85e-5, 1e-4, 0.3, 0.1, 1e-6};
  std::array<double, kNumStates> hi = {40.0, 1.7e-2,  5.1e-2,  0.3,  1.0, 2.0, 0.5};

  bool contains(const ChamberState& x, double tol = 0.0) const {
    const auto a = x.to_array();
    for (int i = 0; i < kNumStates; ++i)
      if (a[i] < lo[i] - tol || a[i] > hi[i] + tol) return false;
    return true;
  }
};

// Admissible input set; binary channels listed with their relaxed interval.
struct InputBox {
  std::array<double, kNumInputs> lo = {-100, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  std::array<double, kNumInputs> hi = {100, 1, 1, 1, 1, 1, 100, 100, 100, 100};

  bool contains(const ControlInput& u, double tol = 0.0) const {
    const auto a = u.to_array();
    for (int i = 0; i < kNumInputs; ++i)
      if (a[i] < lo[i] - tol || a[i] > hi[i] + tol) return false;
    return true;
  }
  double clamp_coord(int i, double v) const {
    if (v < lo[i]) return lo[i];
    if (v > hi[i]) return hi[i];
    return v;
  }
};

// Every flux term entering the state derivative, reported for logging and
// term-level testing. Heat in J s^-1, mass fluxes in kg s^-1, I in W m^-2.
struct FluxBreakdown {
  double q_tec = 0.0;    // thermoelectric heat flux
  double q_led = 0.0;    // LED waste heat
  double q_ex = 0.0;     // ventilation heat exchange
  double q_lo = 0.0;     // wall loss
  double q_sub = 0.0;    // latent heat drawn by transpiration
  double c_exch = 0.0;   // CO2 via ventilator
  double c_leak = 0.0;   // CO2 via leakage
  double c_sub = 0.0;    // net crop CO2 uptake (respiration - photosynthesis)
  double h_exch = 0.0;   // vapor via ventilator
  double h_hum = 0.0;    // humidifier output
  double w_cond = 0.0;   // condensate (returned to the storage tank)
  double h_sub = 0.0;    // canopy transpiration
  double w_ovf1 = 0.0;   // storage tank overflow
  double w_ovf2 = 0.0;   // growing medium overflow
  double w_sub = 0.0;    // crop water uptake
  double w_evap = 0.0;   // free-surface evaporation from the medium
  double irradiance = 0.0;  // total incident light on the canopy
};

}  // namespace phyto
