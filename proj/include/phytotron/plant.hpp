#pragma once

// Lettuce growth fluxes: photosynthesis, respiration, transpiration, water
// uptake and the biomass rate.

#include <cmath>

#include "phytotron/chamber.hpp"
#include "phytotron/params.hpp"

namespace phyto {

// Canopy closure factor in [0,1).
inline double canopy_factor(double B, const PlantParams& pp) {
  return 1.0 - std::exp(-pp.k_LAI * B);
}

// Temperature response of the carboxylation conductance [m/s]; negative
// outside the viable window.
inline double photosynthesis_temperature_response(double T, const PlantParams& pp) {
  return -pp.k_p1 * T * T + pp.k_p2 * T - pp.k_p3;
}

// Gross CO2 assimilation [kg/s]; rectangular-hyperbola saturation in light,
// clamped at zero outside the viable temperature/CO2 regime.
inline double photosynthesis_flux(double B, double T, double C, double I,
                                  const PlantParams& pp) {
  const double light = pp.k_Ip * I;                                   // [kg m^-2 s^-1]
  const double conductance = photosynthesis_temperature_response(T, pp) * (C - pp.k_Gamma);
  const double den = light + conductance;
  if (den <= 0.0) return 0.0;
  const double v = pp.k_amed * canopy_factor(B, pp) * light * conductance / den;
  return v > 0.0 ? v : 0.0;
}

// CO2 released by maintenance respiration [kg/s]; doubles every 10 degC.
inline double respiration_flux(double B, double T, const PlantParams& pp) {
  return pp.k_amed * pp.k_resp * B * std::exp2(0.1 * T - 2.5);
}

// Canopy transpiration [kg/s]; negative under supersaturation (dew uptake).
inline double transpiration_flux(double B, double T, double H, const PlantParams& pp,
                                 const ModelParams& p) {
  return pp.k_amed * pp.k_Htrans * canopy_factor(B, pp) * (saturation_humidity(T, p) - H);
}

// Liquid water drawn from the growing medium [kg/s]: transpired vapor plus
// water bound in new tissue.
inline double water_uptake_flux(double phi_H_sub, double dB_dt, const PlantParams& pp) {
  return phi_H_sub + pp.k_amed * (1.0 - pp.k_fwdw) * dB_dt;
}

// Dry-matter rate [kg m^-2 s^-1] from the whole-chamber CO2 fluxes [kg/s].
inline double biomass_rate(double phi_C_phot, double phi_C_resp, const PlantParams& pp) {
  return (pp.k_alphabeta * phi_C_phot - pp.k_Bresp * phi_C_resp) / pp.k_amed;
}

// Net CO2 flux into the chamber air [kg/s]: respiration adds, photosynthesis removes.
inline double net_co2_flux(double B, double T, double C, double I, const PlantParams& pp) {
  return respiration_flux(B, T, pp) - photosynthesis_flux(B, T, C, I, pp);
}

}  // namespace phyto
