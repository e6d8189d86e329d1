#pragma once

// Assembled chamber + crop dynamics: continuous-time right-hand side with a
// per-term flux report, and the explicit Euler step used plant-side and
// inside the optimizer's shooting rollout.

#include <array>
#include <cmath>

#include "phytotron/chamber.hpp"
#include "phytotron/plant.hpp"
#include "phytotron/types.hpp"

namespace phyto {

struct Derivative {
  std::array<double, kNumStates> dx{};  // d/dt of (T,C,H,W_sto,W_med,W_ovf,B)
  FluxBreakdown flux;
};

inline Derivative state_derivative(const ChamberState& x, const ControlInput& u,
                                   const Disturbance& d, const ModelParams& p,
                                   const PlantParams& pp) {
  const auto chk = [](double v, const char* name) {
    if (!std::isfinite(v)) throw ModelEvalError(name);
    return v;
  };

  FluxBreakdown fb;

  fb.q_tec = chk(tec_heat_flux(x.T, d.T_out, u.u_T, p), "phi_Q_TEC");
  const auto [q_led, irr] = led_fluxes({u.u_I1, u.u_I2, u.u_I3, u.u_I4}, p);
  fb.q_led = chk(q_led, "phi_Q_LED");
  fb.irradiance = chk(irr, "I");
  const auto [q_ex, q_lo] = exchange_and_loss_heat(x.T, d.T_out, u.u_V, p);
  fb.q_ex = chk(q_ex, "phi_Q_ex");
  fb.q_lo = chk(q_lo, "phi_Q_lo");

  const auto [c_exch, c_leak] = co2_exchange_fluxes(x.C, d.C_out, u.u_V, p);
  fb.c_exch = chk(c_exch, "phi_C_exch");
  fb.c_leak = chk(c_leak, "phi_C_leak");

  fb.h_exch = chk((d.H_out - x.H) * p.k_uV * u.u_V, "phi_H_exch");
  fb.h_hum = chk(humidifier_flux(x.H, x.T, u.u_H, p), "phi_u_H");
  const double T_c = 0.5 * (x.T + d.T_out);  // condenser surface temperature
  fb.w_cond = chk(condensation_flux(x.H, T_c, p), "phi_W_cond");

  const double phot = chk(photosynthesis_flux(x.B, x.T, x.C, fb.irradiance, pp), "phi_C_phot");
  const double resp = chk(respiration_flux(x.B, x.T, pp), "phi_C_resp");
  fb.c_sub = resp - phot;
  fb.h_sub = chk(transpiration_flux(x.B, x.T, x.H, pp, p), "phi_H_sub");
  const double dB = chk(biomass_rate(phot, resp, pp), "dB/dt");
  fb.w_sub = chk(water_uptake_flux(fb.h_sub, dB, pp), "phi_W_sub");
  fb.q_sub = -p.lambda_vap * fb.h_sub;
  fb.w_evap = chk(p.k_W_evap * (saturation_humidity(x.T, p) - x.H), "phi_W_evap");

  // Net inflows seen by the two weirs.
  const double in_sto = p.k_uW * u.u_W1 + fb.w_cond - fb.h_hum;
  const double in_med = p.k_uW * u.u_W2 - fb.w_evap - fb.w_sub;
  fb.w_ovf1 = overflow_flux(x.W_sto, p.k_Wm_sto, in_sto);
  fb.w_ovf2 = overflow_flux(x.W_med, p.k_Wm_med, in_med);

  Derivative out;
  out.dx[0] = (fb.q_ex + fb.q_lo + fb.q_tec + fb.q_led + fb.q_sub) / p.k_Cchm;
  out.dx[1] = (fb.c_exch + fb.c_leak + fb.c_sub) / p.k_Vchm;
  out.dx[2] = (fb.h_exch + fb.h_hum - fb.w_cond + fb.h_sub) / p.k_Vchm;
  out.dx[3] = in_sto - fb.w_ovf1;
  out.dx[4] = in_med - fb.w_ovf2;
  out.dx[5] = fb.w_ovf1 + fb.w_ovf2 - p.k_uW * u.u_W3;
  out.dx[6] = dB;
  out.flux = fb;
  return out;
}

inline Derivative state_derivative(const ChamberState& x, const ControlInput& u,
                                   const Disturbance& d, const ModelParams& p) {
  return state_derivative(x, u, d, p, p.plant);
}

// Explicit Euler step; no clamping of the result.
inline ChamberState step_euler(const ChamberState& x, const ControlInput& u,
                               const Disturbance& d, double dt, const ModelParams& p,
                               const PlantParams& pp) {
  const Derivative f = state_derivative(x, u, d, p, pp);
  auto a = x.to_array();
  for (int i = 0; i < kNumStates; ++i) a[i] += dt * f.dx[i];
  return ChamberState::from_array(a);
}

inline ChamberState step_euler(const ChamberState& x, const ControlInput& u,
                               const Disturbance& d, double dt, const ModelParams& p) {
  return step_euler(x, u, d, dt, p, p.plant);
}

}  // namespace phyto
