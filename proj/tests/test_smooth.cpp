#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <random>

#include "phytotron/model.hpp"
#include "phytotron/smooth.hpp"
#include "support/random_box.hpp"
#include "support/tmpfile.hpp"

using namespace phyto;

namespace {

const ModelParams& params() {
  static const ModelParams p = ModelParams::load(testsup::default_params_path());
  return p;
}

struct Point {
  ChamberState x;
  ControlInput u;
  Disturbance d;
};

// Sample a point away from every clamp transition so the smoothed and exact
// evaluations agree to machine precision and finite differences stay tame.
Point margin_respecting_point(std::mt19937& rng) {
  const ModelParams& p = params();
  for (int tries = 0; tries < 20000; ++tries) {
    Point pt{testsup::random_state(rng), testsup::random_input(rng),
             testsup::random_disturbance(rng)};
    const Derivative f = state_derivative(pt.x, pt.u, pt.d, p);
    const double irr = f.flux.irradiance;
    const double g = photosynthesis_temperature_response(pt.x.T, p.plant);
    const double econd = g * (pt.x.C - p.plant.k_Gamma);
    const double z_cond =
        p.condensation_gain() *
        (pt.x.H - saturation_humidity(0.5 * (pt.x.T + pt.d.T_out), p));
    const double in1 = p.k_uW * pt.u.u_W1 + f.flux.w_cond - f.flux.h_hum;
    const double in2 = p.k_uW * pt.u.u_W2 - f.flux.w_evap - f.flux.w_sub;
    const bool ok = irr > 1.0 && std::abs(econd) > 1e-8 && std::abs(z_cond) > 1e-7 &&
                    std::abs(pt.x.W_sto - p.k_Wm_sto) > 5e-3 &&
                    std::abs(pt.x.W_med - p.k_Wm_med) > 5e-3 &&
                    std::abs(in1) > 1e-4 && std::abs(in2) > 1e-4;
    if (ok) return pt;
  }
  FAIL("could not sample a margin-respecting point");
  return {};
}

// Magnitude of the individual flux terms feeding each state row; cancellation
// noise in differences scales with these, not with the (possibly tiny) net.
std::array<double, 7> row_scales(const Point& pt) {
  const ModelParams& p = params();
  const Derivative f = state_derivative(pt.x, pt.u, pt.d, p);
  const FluxBreakdown& fb = f.flux;
  const double phot = photosynthesis_flux(pt.x.B, pt.x.T, pt.x.C, fb.irradiance, p.plant);
  const double resp = respiration_flux(pt.x.B, pt.x.T, p.plant);
  std::array<double, 7> s{};
  s[0] = (std::abs(fb.q_ex) + std::abs(fb.q_lo) + std::abs(fb.q_tec) +
          std::abs(fb.q_led) + std::abs(fb.q_sub)) / p.k_Cchm;
  s[1] = (std::abs(fb.c_exch) + std::abs(fb.c_leak) + resp + phot) / p.k_Vchm;
  s[2] = (std::abs(fb.h_exch) + std::abs(fb.h_hum) + std::abs(fb.w_cond) +
          std::abs(fb.h_sub)) / p.k_Vchm;
  s[3] = p.k_uW * std::abs(pt.u.u_W1) + std::abs(fb.w_cond) + std::abs(fb.h_hum) +
         std::abs(fb.w_ovf1);
  s[4] = p.k_uW * std::abs(pt.u.u_W2) + std::abs(fb.w_evap) + std::abs(fb.w_sub) +
         std::abs(fb.w_ovf2);
  s[5] = std::abs(fb.w_ovf1) + std::abs(fb.w_ovf2) + p.k_uW * std::abs(pt.u.u_W3);
  s[6] = (p.plant.k_alphabeta * phot + p.plant.k_Bresp * resp) / p.plant.k_amed;
  return s;
}

Vec7 smooth_dx(const ChamberState& x, const ControlInput& u, const Disturbance& d) {
  return smooth_state_derivative(x, u, d, params(), params().plant).dx;
}

constexpr std::array<double, 7> kStateStep = {1e-4, 1e-7, 1e-7, 1e-6, 1e-6, 1e-6, 1e-7};
constexpr std::array<double, 10> kInputStep = {1e-4, 1e-5, 1e-5, 1e-5, 1e-5,
                                               1e-5, 1e-4, 1e-4, 1e-4, 1e-4};

}  // namespace

TEST_CASE("smoothed derivative matches the exact model away from clamp layers") {
  std::mt19937 rng(2024);
  const ModelParams& p = params();
  for (int trial = 0; trial < 300; ++trial) {
    const Point pt = margin_respecting_point(rng);
    const Derivative exact = state_derivative(pt.x, pt.u, pt.d, p);
    const Vec7 sm = smooth_dx(pt.x, pt.u, pt.d);
    const auto scale = row_scales(pt);
    for (int i = 0; i < kNumStates; ++i) {
      const double tol = 1e-12 * (scale[i] + 1e-30);
      REQUIRE(std::abs(sm[i] - exact.dx[i]) <= tol);
    }
  }
}

TEST_CASE("analytic state Jacobian matches central differences") {
  std::mt19937 rng(77);
  const ModelParams& p = params();
  for (int trial = 0; trial < 40; ++trial) {
    const Point pt = margin_respecting_point(rng);
    const SmoothDerivative sd = smooth_state_derivative(pt.x, pt.u, pt.d, p, p.plant);
    const auto scale = row_scales(pt);
    for (int j = 0; j < kNumStates; ++j) {
      const double h = kStateStep[j];
      auto ap = pt.x.to_array();
      auto am = pt.x.to_array();
      ap[j] += h;
      am[j] -= h;
      const Vec7 fp = smooth_dx(ChamberState::from_array(ap), pt.u, pt.d);
      const Vec7 fm = smooth_dx(ChamberState::from_array(am), pt.u, pt.d);
      for (int i = 0; i < kNumStates; ++i) {
        const double fd = (fp[i] - fm[i]) / (2.0 * h);
        const double an = sd.A(i, j);
        const double noise = 1e-13 * scale[i] / h;
        const double tol = 1e-5 * std::max(std::abs(an), std::abs(fd)) + noise + 1e-20;
        REQUIRE(std::abs(fd - an) <= tol);
      }
    }
  }
}

TEST_CASE("analytic input Jacobian matches central differences") {
  std::mt19937 rng(78);
  const ModelParams& p = params();
  for (int trial = 0; trial < 40; ++trial) {
    const Point pt = margin_respecting_point(rng);
    const SmoothDerivative sd = smooth_state_derivative(pt.x, pt.u, pt.d, p, p.plant);
    const auto scale = row_scales(pt);
    for (int j = 0; j < kNumInputs; ++j) {
      const double h = kInputStep[j];
      auto ap = pt.u.to_array();
      auto am = pt.u.to_array();
      ap[j] += h;
      am[j] -= h;
      const Vec7 fp = smooth_dx(pt.x, ControlInput::from_array(ap), pt.d);
      const Vec7 fm = smooth_dx(pt.x, ControlInput::from_array(am), pt.d);
      for (int i = 0; i < kNumStates; ++i) {
        const double fd = (fp[i] - fm[i]) / (2.0 * h);
        const double an = sd.B(i, j);
        const double noise = 1e-13 * scale[i] / h;
        const double tol = 1e-5 * std::max(std::abs(an), std::abs(fd)) + noise + 1e-20;
        REQUIRE(std::abs(fd - an) <= tol);
      }
    }
  }
}

TEST_CASE("weir Jacobian holds inside the sigmoid transition") {
  const ModelParams& p = params();
  ChamberState x;
  x.W_sto = p.k_Wm_sto;  // gate at half height, curvature minimal
  x.W_med = p.k_Wm_med + 1.5e-5;
  ControlInput u;
  u.u_W1 = 0.8;
  u.u_W2 = 0.6;
  Disturbance d;
  const SmoothDerivative sd = smooth_state_derivative(x, u, d, p, p.plant);

  const double h = 1e-9;
  for (int j : {3, 4}) {
    auto ap = x.to_array();
    auto am = x.to_array();
    ap[j] += h;
    am[j] -= h;
    const Vec7 fp = smooth_dx(ChamberState::from_array(ap), u, d);
    const Vec7 fm = smooth_dx(ChamberState::from_array(am), u, d);
    for (int i : {3, 4, 5}) {
      const double fd = (fp[i] - fm[i]) / (2.0 * h);
      const double an = sd.A(i, j);
      REQUIRE(std::abs(fd - an) <= 1e-5 * std::max({std::abs(an), std::abs(fd), 1e-6}));
    }
  }
  // At a half-open gate the tank row and the overflow row split the inflow.
  REQUIRE(sd.A(3, 3) < 0.0);
  REQUIRE(sd.A(5, 3) > 0.0);
  REQUIRE(std::abs(sd.A(3, 3) + sd.A(5, 3)) < 1e-18);
}

TEST_CASE("optimizer Jacobians track the exact one-step map") {
  // Central differences of the exact Euler step against I + dt*A and dt*B.
  std::mt19937 rng(99);
  const ModelParams& p = params();
  const double dt = 30.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Point pt = margin_respecting_point(rng);
    const SmoothStep st = smooth_step(pt.x, pt.u, pt.d, dt, p, p.plant);
    const auto scale = row_scales(pt);
    const auto x0 = pt.x.to_array();
    for (int j = 0; j < kNumStates; ++j) {
      const double h = kStateStep[j];
      auto ap = x0;
      auto am = x0;
      ap[j] += h;
      am[j] -= h;
      const auto xp = step_euler(ChamberState::from_array(ap), pt.u, pt.d, dt, p).to_array();
      const auto xm = step_euler(ChamberState::from_array(am), pt.u, pt.d, dt, p).to_array();
      for (int i = 0; i < kNumStates; ++i) {
        // Compare the derivative parts; the identity column is exact anyway.
        const double fd = ((xp[i] - x0[i]) - (xm[i] - x0[i])) / (2.0 * h) - (i == j ? 1.0 : 0.0);
        const double an = st.A(i, j) - (i == j ? 1.0 : 0.0);
        const double noise = 1e-13 * (std::abs(x0[i]) + dt * scale[i]) / h;
        const double tol = 1e-4 * std::max(std::abs(an), std::abs(fd)) + noise + 1e-20;
        REQUIRE(std::abs(fd - an) <= tol);
      }
    }
  }
}

TEST_CASE("smooth step advances by dt times the smooth derivative") {
  std::mt19937 rng(5);
  const ModelParams& p = params();
  const Point pt = margin_respecting_point(rng);
  const SmoothDerivative sd = smooth_state_derivative(pt.x, pt.u, pt.d, p, p.plant);
  const SmoothStep st = smooth_step(pt.x, pt.u, pt.d, 30.0, p, p.plant);
  const auto x0 = pt.x.to_array();
  const auto x1 = st.next.to_array();
  for (int i = 0; i < kNumStates; ++i)
    REQUIRE(x1[i] == Catch::Approx(x0[i] + 30.0 * sd.dx[i]).margin(0.0).epsilon(1e-15));
  REQUIRE((st.A - (Mat77::Identity() + 30.0 * sd.A)).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((st.B - 30.0 * sd.B).cwiseAbs().maxCoeff() == 0.0);
}
