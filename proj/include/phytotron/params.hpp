#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "phytotron/kv.hpp"

namespace phyto {

// Lettuce growth constants (file keys carry the plant. prefix).
struct PlantParams {
  double k_amed = 1.0;       // growing-medium area [m^2]
  double k_LAI = 7.5;        // canopy area per kg dry matter [m^2/kg]
  double k_Ip = 1.7e-8;      // light-use efficiency [kg/J]
  double k_p1 = 5.11e-6;     // temperature response, T^2 term [m s^-1 K^-2]
  double k_p2 = 2.3e-4;      // temperature response, T term [m s^-1 K^-1]
  double k_p3 = 6.29e-4;     // temperature response, offset [m/s]
  double k_Gamma = 5.2e-5;   // CO2 compensation point [kg/m^3]
  double k_resp = 3.5e-7;    // respiration coefficient [1/s]
  double k_Htrans = 5.0e-5;  // transpiration mass-transfer coefficient [m/s]
  double k_fwdw = 0.05;      // fresh/dry weight factor [-]
  double k_alphabeta = 0.544;  // biomass yield per kg CO2 [-]
  double k_Bresp = 0.68;     // respiration loss rate [-]
};

// Chamber, actuator and air constants. Loaded from a flat key=value file;
// all keys are required unless noted, and must be strictly positive except
// lambda_vap and k_W_evap which may be zero.
struct ModelParams {
  // thermoelectric assembly
  double k_alpha = 1.25;  // Seebeck coefficient [V/K]
  double k_Rq = 1.0;      // series resistance [ohm]
  double k_q = 2.0;       // module thermal conductance [W/K]
  double k_V = 24.0;      // max operating voltage [V]

  // LED channels
  std::array<double, 4> k_Qm = {30.0, 30.0, 30.0, 30.0};  // max waste heat [W]
  std::array<double, 4> k_Im = {80.0, 80.0, 80.0, 80.0};  // max radiant flux [W/m^2]
  std::array<double, 4> eta_LU = {0.95, 0.90, 0.85, 0.80};  // light-utilization weight [-]

  // air and enclosure
  double k_c = 1005.0;     // specific heat of air [J/(kg K)]
  double k_rho = 1.204;    // air density [kg/m^3]
  double k_uV = 1.5e-4;    // ventilator volume flow [m^3/s]
  double k_A = 6.0;        // enclosure surface area [m^2]
  double k_U = 0.5;        // wall heat-transfer coefficient [W/(m^2 K)]
  double k_Cchm = 3.0e4;   // lumped heat capacity [J/K]
  double k_Vchm = 1.0;     // air volume [m^3]
  double k_leak = 2.0e-5;  // leakage exchange rate [m^3/s]

  // humidity path
  double k_uH = 5.0e-5;       // humidifier rate [m^3/s]
  double k_mw = 0.018015;     // molar mass of water [kg/mol]
  double k_Rg = 8.314;        // gas constant [J/(mol K)]
  double k_acond = 1.0;       // condenser area [m^2]
  double k_hcond = 0.112;     // condenser heat-transfer coefficient [W/(m^2 K)]
  double k_Le = 0.89;         // Lewis number [-]
  double lambda_vap = 2.45e6; // latent heat of vaporization [J/kg], 0 disables

  // water system
  double k_uW = 2.0e-3;     // pump output rate [kg/s]
  double k_Wm_sto = 0.285;  // storage tank capacity [kg]
  double k_Wm_med = 0.95;   // growing-medium holding capacity [kg]
  double k_W_evap = 0.0;    // free-surface evaporation rate [kg/s], 0 disables

  PlantParams plant;

  // Condensation gain k_a,cond k_h,cond / (k_rho k_c k_Le^(2/3)) [m^3/s].
  double condensation_gain() const;

  static ModelParams load(const std::string& path);
};

namespace detail {

inline double positive(const KeyValueFile& f, const std::string& key) {
  const double v = f.get_double(key);
  if (!(v > 0.0))
    throw std::runtime_error(f.path() + ": key '" + key + "' must be > 0, got " +
                             std::to_string(v));
  return v;
}

inline double non_negative(const KeyValueFile& f, const std::string& key) {
  const double v = f.get_double(key);
  if (!(v >= 0.0))
    throw std::runtime_error(f.path() + ": key '" + key + "' must be >= 0, got " +
                             std::to_string(v));
  return v;
}

}  // namespace detail

inline ModelParams ModelParams::load(const std::string& path) {
  const KeyValueFile f = KeyValueFile::load(path);
  ModelParams p;

  p.k_alpha = detail::positive(f, "k_alpha");
  p.k_Rq = detail::positive(f, "k_R_q");
  p.k_q = detail::positive(f, "k_q");
  p.k_V = detail::positive(f, "k_V");

  for (int i = 0; i < 4; ++i) {
    const std::string n = std::to_string(i + 1);
    p.k_Qm[i] = detail::positive(f, "k_Q_m" + n);
    p.k_Im[i] = detail::positive(f, "k_I_m" + n);
    p.eta_LU[i] = detail::positive(f, "eta_LU" + n);
  }

  p.k_c = detail::positive(f, "k_c");
  p.k_rho = detail::positive(f, "k_rho");
  p.k_uV = detail::positive(f, "k_u_V");
  p.k_A = detail::positive(f, "k_A");
  p.k_U = detail::positive(f, "k_U");
  p.k_Cchm = detail::positive(f, "k_C_chm");
  p.k_Vchm = detail::positive(f, "k_V_chm");
  p.k_leak = detail::positive(f, "k_leak");

  p.k_uH = detail::positive(f, "k_u_H");
  p.k_mw = detail::positive(f, "k_mw");
  p.k_Rg = detail::positive(f, "k_R_g");
  p.k_acond = detail::positive(f, "k_a_cond");
  p.k_hcond = detail::positive(f, "k_h_cond");
  p.k_Le = detail::positive(f, "k_Le");
  p.lambda_vap = detail::non_negative(f, "lambda_vap");

  p.k_uW = detail::positive(f, "k_u_W");
  p.k_Wm_sto = detail::positive(f, "k_Wm_sto");
  p.k_Wm_med = detail::positive(f, "k_Wm_med");
  p.k_W_evap = detail::non_negative(f, "k_W_evap");

  p.plant.k_amed = detail::positive(f, "plant.k_a_med");
  p.plant.k_LAI = detail::positive(f, "plant.k_LAI");
  p.plant.k_Ip = detail::positive(f, "plant.k_I_p");
  p.plant.k_p1 = detail::positive(f, "plant.k_p1");
  p.plant.k_p2 = detail::positive(f, "plant.k_p2");
  p.plant.k_p3 = detail::positive(f, "plant.k_p3");
  p.plant.k_Gamma = detail::positive(f, "plant.k_Gamma");
  p.plant.k_resp = detail::positive(f, "plant.k_resp");
  p.plant.k_Htrans = detail::positive(f, "plant.k_H_trans");
  p.plant.k_fwdw = detail::positive(f, "plant.k_fw_dw");
  p.plant.k_alphabeta = detail::positive(f, "plant.k_alpha_beta");
  p.plant.k_Bresp = detail::positive(f, "plant.k_B_resp");

  return p;
}

inline double ModelParams::condensation_gain() const {
  return k_acond * k_hcond / (k_rho * k_c * std::pow(k_Le, 2.0 / 3.0));
}

}  // namespace phyto
