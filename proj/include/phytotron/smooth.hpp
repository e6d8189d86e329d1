#pragma once

// Smoothed twin of the chamber+crop dynamics for use inside the optimizer:
// every max(.,0) clamp becomes a scaled softplus and the weir switch becomes
// a sigmoid, so the rollout is C^inf and carries exact analytic Jacobians.
// The simulation path keeps the exact clamps; away from the thin smoothing
// layers the two evaluations agree to machine precision.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <numbers>

#include "phytotron/chamber.hpp"
#include "phytotron/params.hpp"
#include "phytotron/plant.hpp"
#include "phytotron/types.hpp"

namespace phyto {

using Vec7 = Eigen::Matrix<double, 7, 1>;
using Mat77 = Eigen::Matrix<double, 7, 7>;
using Mat7x10 = Eigen::Matrix<double, 7, 10>;

// Per-term smoothing scales; transition width of each clamp is scale/sharpness.
struct SmoothingConfig {
  double sharpness = 1e4;     // [-]
  double cond_scale = 1e-6;   // [kg/s] condensation clamp
  double phot_scale = 1e-7;   // [kg m^-2 s^-1] assimilation clamps
  double water_scale = 2e-3;  // [kg/s] weir inflow clamp
  double level_scale = 0.3;   // [kg] weir level switch
};

namespace smooth_detail {

inline double softplus(double a) {
  return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
}

inline double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

struct ValGrad {
  double v;  // value
  double d;  // derivative w.r.t. the argument
};

// Smooth max(z, 0): width scale/k.
inline ValGrad smooth_max0(double z, double scale, double k) {
  const double w = scale / k;
  return {w * softplus(z / w), sigmoid(z / w)};
}

// Smooth step 1{level > cap}: width scale/k.
inline ValGrad smooth_gate(double level, double cap, double scale, double k) {
  const double w = scale / k;
  const double s = sigmoid((level - cap) / w);
  return {s, s * (1.0 - s) / w};
}

// Saturated vapor density and its temperature derivative.
inline ValGrad hsat_vg(double T, const ModelParams& p) {
  const double expo = 17.625 * T / (T + 243.03);
  const double dexpo = 17.625 * 243.03 / ((T + 243.03) * (T + 243.03));
  const double psat = 1000.0 * 0.61094 * std::exp(expo);
  const double c = p.k_mw / p.k_Rg;
  const double tk = T + 273.0;
  return {c * psat / tk, c * psat * (dexpo * tk - 1.0) / (tk * tk)};
}

}  // namespace smooth_detail

struct SmoothDerivative {
  Vec7 dx = Vec7::Zero();
  Mat77 A = Mat77::Zero();    // d(dx)/dx
  Mat7x10 B = Mat7x10::Zero();  // d(dx)/du
};

inline SmoothDerivative smooth_state_derivative(const ChamberState& x, const ControlInput& u,
                                                const Disturbance& d, const ModelParams& p,
                                                const PlantParams& pp,
                                                const SmoothingConfig& sm = {}) {
  using namespace smooth_detail;
  enum { iT = 0, iC, iH, iWs, iWm, iWo, iB };
  enum { juT = 0, juV, juH, juW1, juW2, juW3, juI1 };

  SmoothDerivative out;
  Mat77& A = out.A;
  Mat7x10& B = out.B;

  const double k = sm.sharpness;
  const ValGrad hsT = hsat_vg(x.T, p);

  // Thermoelectric module.
  const double a1 = p.k_alpha * p.k_V / p.k_Rq;
  const double a2 = p.k_V * p.k_V / (2.0 * p.k_Rq);
  const double f = u.u_T / 100.0;
  const double q_tec = a1 * f * x.T + a2 * f * f + p.k_q * (d.T_out - x.T);
  const double dqtec_dT = a1 * f - p.k_q;
  const double dqtec_duT = (a1 * x.T + 2.0 * a2 * f) / 100.0;

  // LED panel.
  const std::array<double, 4> u_led = {u.u_I1, u.u_I2, u.u_I3, u.u_I4};
  double q_led = 0.0, irr = 0.0;
  std::array<double, 4> dqled_du{}, dirr_du{};
  for (int i = 0; i < 4; ++i) {
    q_led += p.k_Qm[i] * u_led[i] / 100.0;
    irr += p.eta_LU[i] * p.k_Im[i] * u_led[i] / 100.0;
    dqled_du[i] = p.k_Qm[i] / 100.0;
    dirr_du[i] = p.eta_LU[i] * p.k_Im[i] / 100.0;
  }

  // Ventilation heat and wall loss.
  const double kcrv = p.k_c * p.k_rho * p.k_uV;
  const double q_ex = kcrv * (d.T_out - x.T) * u.u_V;
  const double q_lo = p.k_A * p.k_U * (d.T_out - x.T);

  // Gas exchange.
  const double c_exch = (d.C_out - x.C) * p.k_uV * u.u_V;
  const double c_leak = (d.C_out - x.C) * p.k_leak;
  const double h_exch = (d.H_out - x.H) * p.k_uV * u.u_V;

  // Humidifier.
  const double h_hum = (hsT.v - x.H) * p.k_uH * u.u_H;
  const double dhum_dT = hsT.d * p.k_uH * u.u_H;
  const double dhum_dH = -p.k_uH * u.u_H;
  const double dhum_duH = (hsT.v - x.H) * p.k_uH;

  // Condensation on the heat-exchanger surface at T_c = (T + T_out)/2.
  const double gain = p.condensation_gain();
  const ValGrad hsC = hsat_vg(0.5 * (x.T + d.T_out), p);
  const ValGrad cond = smooth_max0(gain * (x.H - hsC.v), sm.cond_scale, k);
  const double dcond_dH = cond.d * gain;
  const double dcond_dT = cond.d * gain * (-0.5 * hsC.d);

  // Crop: canopy, assimilation, respiration, transpiration.
  const double eL = std::exp(-pp.k_LAI * x.B);
  const double canopy = 1.0 - eL;
  const double dcanopy = pp.k_LAI * eL;

  const double g = -pp.k_p1 * x.T * x.T + pp.k_p2 * x.T - pp.k_p3;
  const double dg = -2.0 * pp.k_p1 * x.T + pp.k_p2;
  const double light = pp.k_Ip * irr;
  const double econd = g * (x.C - pp.k_Gamma);
  const ValGrad lp = smooth_max0(light, sm.phot_scale, k);
  const ValGrad ep = smooth_max0(econd, sm.phot_scale, k);
  const double D = lp.v + ep.v;
  const double M = lp.v * ep.v / D;
  const double dM_dlp = (ep.v / D) * (ep.v / D);
  const double dM_dep = (lp.v / D) * (lp.v / D);

  const double phot = pp.k_amed * canopy * M;
  const double dphot_dB = pp.k_amed * dcanopy * M;
  const double dphot_dT = pp.k_amed * canopy * dM_dep * ep.d * dg * (x.C - pp.k_Gamma);
  const double dphot_dC = pp.k_amed * canopy * dM_dep * ep.d * g;
  std::array<double, 4> dphot_du{};
  for (int i = 0; i < 4; ++i)
    dphot_du[i] = pp.k_amed * canopy * dM_dlp * lp.d * pp.k_Ip * dirr_du[i];

  const double q10 = std::exp2(0.1 * x.T - 2.5);
  const double resp = pp.k_amed * pp.k_resp * x.B * q10;
  const double dresp_dB = pp.k_amed * pp.k_resp * q10;
  const double dresp_dT = resp * 0.1 * std::numbers::ln2;

  const double kt = pp.k_amed * pp.k_Htrans;
  const double h_sub = kt * canopy * (hsT.v - x.H);
  const double dhsub_dB = kt * dcanopy * (hsT.v - x.H);
  const double dhsub_dT = kt * canopy * hsT.d;
  const double dhsub_dH = -kt * canopy;

  const double dB_rate = (pp.k_alphabeta * phot - pp.k_Bresp * resp) / pp.k_amed;
  const double dBr_dT = (pp.k_alphabeta * dphot_dT - pp.k_Bresp * dresp_dT) / pp.k_amed;
  const double dBr_dC = pp.k_alphabeta * dphot_dC / pp.k_amed;
  const double dBr_dB = (pp.k_alphabeta * dphot_dB - pp.k_Bresp * dresp_dB) / pp.k_amed;
  std::array<double, 4> dBr_du{};
  for (int i = 0; i < 4; ++i) dBr_du[i] = pp.k_alphabeta * dphot_du[i] / pp.k_amed;

  const double wfac = pp.k_amed * (1.0 - pp.k_fwdw);
  const double w_sub = h_sub + wfac * dB_rate;
  const double dwsub_dT = dhsub_dT + wfac * dBr_dT;
  const double dwsub_dC = wfac * dBr_dC;
  const double dwsub_dH = dhsub_dH;
  const double dwsub_dB = dhsub_dB + wfac * dBr_dB;
  std::array<double, 4> dwsub_du{};
  for (int i = 0; i < 4; ++i) dwsub_du[i] = wfac * dBr_du[i];

  const double w_evap = p.k_W_evap * (hsT.v - x.H);
  const double devap_dT = p.k_W_evap * hsT.d;
  const double devap_dH = -p.k_W_evap;

  // Tank weirs.
  const double in1 = p.k_uW * u.u_W1 + cond.v - h_hum;
  const double din1_dT = dcond_dT - dhum_dT;
  const double din1_dH = dcond_dH - dhum_dH;
  const double in2 = p.k_uW * u.u_W2 - w_evap - w_sub;
  const double din2_dT = -devap_dT - dwsub_dT;
  const double din2_dC = -dwsub_dC;
  const double din2_dH = -devap_dH - dwsub_dH;
  const double din2_dB = -dwsub_dB;

  const ValGrad gate1 = smooth_gate(x.W_sto, p.k_Wm_sto, sm.level_scale, k);
  const ValGrad pos1 = smooth_max0(in1, sm.water_scale, k);
  const double ovf1 = gate1.v * pos1.v;
  const ValGrad gate2 = smooth_gate(x.W_med, p.k_Wm_med, sm.level_scale, k);
  const ValGrad pos2 = smooth_max0(in2, sm.water_scale, k);
  const double ovf2 = gate2.v * pos2.v;
  const double s1 = gate1.v * pos1.d;  // d ovf1 / d in1
  const double s2 = gate2.v * pos2.d;

  // Row T.
  out.dx[iT] = (q_ex + q_lo + q_tec + q_led - p.lambda_vap * h_sub) / p.k_Cchm;
  A(iT, iT) = (-kcrv * u.u_V - p.k_A * p.k_U + dqtec_dT - p.lambda_vap * dhsub_dT) / p.k_Cchm;
  A(iT, iH) = -p.lambda_vap * dhsub_dH / p.k_Cchm;
  A(iT, iB) = -p.lambda_vap * dhsub_dB / p.k_Cchm;
  B(iT, juT) = dqtec_duT / p.k_Cchm;
  B(iT, juV) = kcrv * (d.T_out - x.T) / p.k_Cchm;
  for (int i = 0; i < 4; ++i) B(iT, juI1 + i) = dqled_du[i] / p.k_Cchm;

  // Row C.
  out.dx[iC] = (c_exch + c_leak + resp - phot) / p.k_Vchm;
  A(iC, iT) = (dresp_dT - dphot_dT) / p.k_Vchm;
  A(iC, iC) = (-p.k_uV * u.u_V - p.k_leak - dphot_dC) / p.k_Vchm;
  A(iC, iB) = (dresp_dB - dphot_dB) / p.k_Vchm;
  B(iC, juV) = (d.C_out - x.C) * p.k_uV / p.k_Vchm;
  for (int i = 0; i < 4; ++i) B(iC, juI1 + i) = -dphot_du[i] / p.k_Vchm;

  // Row H.
  out.dx[iH] = (h_exch + h_hum - cond.v + h_sub) / p.k_Vchm;
  A(iH, iT) = (dhum_dT - dcond_dT + dhsub_dT) / p.k_Vchm;
  A(iH, iH) = (-p.k_uV * u.u_V + dhum_dH - dcond_dH + dhsub_dH) / p.k_Vchm;
  A(iH, iB) = dhsub_dB / p.k_Vchm;
  B(iH, juV) = (d.H_out - x.H) * p.k_uV / p.k_Vchm;
  B(iH, juH) = dhum_duH / p.k_Vchm;

  // Row W_sto.
  out.dx[iWs] = in1 - ovf1;
  A(iWs, iT) = (1.0 - s1) * din1_dT;
  A(iWs, iH) = (1.0 - s1) * din1_dH;
  A(iWs, iWs) = -gate1.d * pos1.v;
  B(iWs, juW1) = (1.0 - s1) * p.k_uW;
  B(iWs, juH) = (1.0 - s1) * (-dhum_duH);

  // Row W_med.
  out.dx[iWm] = in2 - ovf2;
  A(iWm, iT) = (1.0 - s2) * din2_dT;
  A(iWm, iC) = (1.0 - s2) * din2_dC;
  A(iWm, iH) = (1.0 - s2) * din2_dH;
  A(iWm, iB) = (1.0 - s2) * din2_dB;
  A(iWm, iWm) = -gate2.d * pos2.v;
  B(iWm, juW2) = (1.0 - s2) * p.k_uW;
  for (int i = 0; i < 4; ++i) B(iWm, juI1 + i) = (1.0 - s2) * (-dwsub_du[i]);

  // Row W_ovf.
  out.dx[iWo] = ovf1 + ovf2 - p.k_uW * u.u_W3;
  A(iWo, iT) = s1 * din1_dT + s2 * din2_dT;
  A(iWo, iC) = s2 * din2_dC;
  A(iWo, iH) = s1 * din1_dH + s2 * din2_dH;
  A(iWo, iB) = s2 * din2_dB;
  A(iWo, iWs) = gate1.d * pos1.v;
  A(iWo, iWm) = gate2.d * pos2.v;
  B(iWo, juW1) = s1 * p.k_uW;
  B(iWo, juW2) = s2 * p.k_uW;
  B(iWo, juW3) = -p.k_uW;
  B(iWo, juH) = s1 * (-dhum_duH);
  for (int i = 0; i < 4; ++i) B(iWo, juI1 + i) = s2 * (-dwsub_du[i]);

  // Row B.
  out.dx[iB] = dB_rate;
  A(iB, iT) = dBr_dT;
  A(iB, iC) = dBr_dC;
  A(iB, iB) = dBr_dB;
  for (int i = 0; i < 4; ++i) B(iB, juI1 + i) = dBr_du[i];

  return out;
}

struct SmoothStep {
  ChamberState next;
  Mat77 A = Mat77::Identity();  // d next / d x
  Mat7x10 B = Mat7x10::Zero();  // d next / d u
};

// Euler step of the smoothed dynamics with discrete-time Jacobians.
inline SmoothStep smooth_step(const ChamberState& x, const ControlInput& u,
                              const Disturbance& d, double dt, const ModelParams& p,
                              const PlantParams& pp, const SmoothingConfig& sm = {}) {
  const SmoothDerivative f = smooth_state_derivative(x, u, d, p, pp, sm);
  SmoothStep s;
  auto a = x.to_array();
  for (int i = 0; i < kNumStates; ++i) a[i] += dt * f.dx[i];
  s.next = ChamberState::from_array(a);
  s.A = Mat77::Identity() + dt * f.A;
  s.B = dt * f.B;
  return s;
}

}  // namespace phyto
