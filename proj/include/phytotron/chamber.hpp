#pragma once

// Chamber-side flux laws: thermoelectric module, LED panel, ventilation,
// leakage, humidification, condensation and tank overflow.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "phytotron/params.hpp"
#include "phytotron/types.hpp"

namespace phyto {

// Raised when a model evaluation produces a non-finite flux.
struct ModelEvalError : std::runtime_error {
  explicit ModelEvalError(const std::string& flux)
      : std::runtime_error("non-finite model evaluation in flux '" + flux + "'"),
        flux_name(flux) {}
  std::string flux_name;
};

// Heat delivered by the thermoelectric module [W]. Drive u_T in [-100,100]
// maps to the voltage fraction u_T/100; negative drive cools, the Joule term
// always heats, the conduction term follows the gradient.
inline double tec_heat_flux(double T, double T_out, double u_T, const ModelParams& p) {
  if (!std::isfinite(T) || !std::isfinite(T_out) || !std::isfinite(u_T))
    throw std::domain_error("tec_heat_flux: non-finite input");
  const double f = u_T / 100.0;
  const double v = f * p.k_V;  // applied voltage [V]
  return p.k_alpha * p.k_V * f * T / p.k_Rq + v * v / (2.0 * p.k_Rq) + p.k_q * (T_out - T);
}

// Waste heat [W] and radiant flux at the canopy [W/m^2] from the four LED
// channels; drives are percentages.
inline std::pair<double, double> led_fluxes(const std::array<double, 4>& u_I,
                                            const ModelParams& p) {
  double heat = 0.0, irradiance = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (!std::isfinite(u_I[i]) || u_I[i] < 0.0 || u_I[i] > 100.0)
      throw std::domain_error("led_fluxes: channel " + std::to_string(i + 1) +
                              " drive outside [0,100]");
    const double f = u_I[i] / 100.0;
    heat += p.k_Qm[i] * f;
    irradiance += p.eta_LU[i] * p.k_Im[i] * f;
  }
  return {heat, irradiance};
}

// Ventilation exchange and wall loss [W], both proportional to T_out - T.
inline std::pair<double, double> exchange_and_loss_heat(double T, double T_out, double u_V,
                                                        const ModelParams& p) {
  const double q_ex = p.k_c * p.k_rho * (T_out - T) * p.k_uV * u_V;
  const double q_lo = p.k_A * p.k_U * (T_out - T);
  return {q_ex, q_lo};
}

// Saturated vapor density [kg/m^3] at T_ref [degC], Magnus form. The 0.61094
// coefficient is kPa, converted to Pa before the ideal-gas division.
inline double saturation_humidity(double T_ref, const ModelParams& p) {
  const double p_sat = 1000.0 * 0.61094 * std::exp(17.625 * T_ref / (T_ref + 243.03));
  return p.k_mw / (p.k_Rg * (T_ref + 273.0)) * p_sat;
}

// Condensate mass flux [kg/s] on a surface at T_c; one-way (never re-evaporates).
inline double condensation_flux(double H, double T_c, const ModelParams& p) {
  const double v = p.condensation_gain() * (H - saturation_humidity(T_c, p));
  return v > 0.0 ? v : 0.0;
}

// Humidifier output [kg/s]; proportional to the subsaturation at chamber T.
inline double humidifier_flux(double H, double T, double u_H, const ModelParams& p) {
  return (saturation_humidity(T, p) - H) * p.k_uH * u_H;
}

// CO2 exchange via ventilator and via leakage [kg/s].
inline std::pair<double, double> co2_exchange_fluxes(double C, double C_out, double u_V,
                                                     const ModelParams& p) {
  return {(C_out - C) * p.k_uV * u_V, (C_out - C) * p.k_leak};
}

// One-way weir: passes the net inflow once the tank is above capacity.
inline double overflow_flux(double level, double capacity, double effective_inflow) {
  if (level <= capacity) return 0.0;
  return effective_inflow > 0.0 ? effective_inflow : 0.0;
}

}  // namespace phyto
