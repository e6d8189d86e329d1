#pragma once

// One receding-horizon controller tick: assemble the OCP at time t from the
// reference generator and the weather preview, solve it, and post-process the
// first input so the applied command is admissible exactly (binaries snapped
// to {0,1}, continuous channels clamped).

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <ostream>

#include "phytotron/ocp.hpp"
#include "phytotron/references.hpp"
#include "phytotron/solver.hpp"
#include "phytotron/weather.hpp"

namespace phyto {

struct ControlStepResult {
  ControlInput applied;       // admissible input actually sent to the plant
  OcpSolution solution;       // raw solver output for the full horizon
  Eigen::VectorXd warm_next;  // shifted decision vector for the next tick
  bool preview_held = false;  // weather preview ran past the series end
};

// Binaries snap to the nearest vertex (ties toward 0); continuous channels
// clamp to the input box, so the result lies in the admissible set exactly.
inline ControlInput admissible_projection(const ControlInput& u) {
  const InputBox box;
  auto a = u.to_array();
  for (int j = 0; j < kNumInputs; ++j) a[j] = std::min(std::max(a[j], box.lo[j]), box.hi[j]);
  for (int b : kBinaryInputIndices) a[b] = a[b] > 0.5 ? 1.0 : 0.0;
  return ControlInput::from_array(a);
}

// Warm start for t + dt: drop stage 0, duplicate the final stage, keep slack.
inline Eigen::VectorXd shift_decision(const Eigen::VectorXd& z, int horizon) {
  Eigen::VectorXd out = z;
  for (int i = 0; i + 1 < horizon; ++i)
    out.segment(i * kNumInputs, kNumInputs) = z.segment((i + 1) * kNumInputs, kNumInputs);
  return out;
}

inline ControlStepResult control_step(const ChamberState& x, double t,
                                      const WeatherSeries& weather, const ModelParams& params,
                                      const OcpConfig& cfg = {},
                                      const Eigen::VectorXd* warm_start = nullptr,
                                      std::ostream* warn = nullptr) {
  const std::vector<ReferenceSample> refs = reference_window(t, cfg.horizon, cfg.dt);
  const DisturbancePreview pv = preview(weather, t, cfg.horizon, cfg.dt, warn);
  const std::vector<Disturbance> dist(pv.samples.begin(), pv.samples.begin() + cfg.horizon);

  OcpProblem pb = build_ocp(x, refs, dist, params, cfg);
  ControlStepResult res;
  res.solution = solve_ocp(pb, warm_start);
  res.applied = admissible_projection(res.solution.inputs.front());
  res.warm_next = shift_decision(res.solution.z, cfg.horizon);
  res.preview_held = pv.held_last;
  return res;
}

}  // namespace phyto
