#pragma once

// Receding-horizon optimal control problem over the smoothed dynamics.
// Decision vector z = [u_0; ...; u_{N-1}; eps] with eps the shared slack of
// the relaxed binary equalities nu = nu^2 + eps.  The problem exposes the
// penalized objective as a residual system r(z) with analytic Jacobian so the
// solver can run Gauss-Newton steps; merit(z, rho) == |r|^2 by construction.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "phytotron/params.hpp"
#include "phytotron/references.hpp"
#include "phytotron/smooth.hpp"
#include "phytotron/types.hpp"

namespace phyto {

struct OcpConfig {
  int horizon = 5;     // stages
  double dt = 30.0;    // [s]
  double q_T = 5000.0;          // stage tracking weights
  double q_C = 1.11e12;
  double p_T = 5000.0;          // terminal tracking weights
  double p_C = 1.1e12;
  std::array<double, kNumInputs> r_diag = {0.1, 1.0, 0.25, 0.5, 0.5,
                                           0.5, 100.0, 100.0, 100.0, 100.0};
  double alpha = 1e6;           // slack weight
  double mu_box = 1e8;          // state box penalty weight
  double slack_max = 0.25;
  double stationarity_tol = 1e-6;
  int max_iterations = 100;     // shared across the penalty continuation
  double rho_init = 1e3;  // soft enough that tracking picks each vertex
  double rho_growth = 100.0;
  double rho_max = 1e12;
  double eps_tol = 1e-6;        // slack acceptance
  double gap_tol = 1e-3;        // binary gap acceptance
  SmoothingConfig smoothing;

  int num_vars() const { return horizon * kNumInputs + 1; }

  void validate() const {
    if (horizon < 1) throw std::invalid_argument("ocp: horizon must be at least 1");
    if (!(dt > 0.0)) throw std::invalid_argument("ocp: dt must be positive");
    if (!(alpha >= 1e3)) throw std::invalid_argument("ocp: alpha must be at least 1e3");
    if (!(q_T >= 0.0) || !(q_C >= 0.0) || !(p_T >= 0.0) || !(p_C >= 0.0))
      throw std::invalid_argument("ocp: tracking weights must be non-negative");
    for (double r : r_diag)
      if (!(r > 0.0)) throw std::invalid_argument("ocp: input weights must be positive");
    if (!(mu_box >= 0.0)) throw std::invalid_argument("ocp: mu_box must be non-negative");
    if (!(rho_init > 0.0) || !(rho_growth > 1.0) || !(rho_max >= rho_init))
      throw std::invalid_argument("ocp: invalid penalty schedule");
    if (max_iterations < 1) throw std::invalid_argument("ocp: max_iterations must be positive");
  }
};

inline double stage_cost(const ChamberState& x, const ControlInput& u,
                         const ReferenceSample& ref, const OcpConfig& cfg) {
  const double eT = x.T - ref.T_ref;
  const double eC = x.C - ref.C_ref;
  double c = cfg.q_T * eT * eT + cfg.q_C * eC * eC;
  const auto ua = u.to_array();
  for (int j = 0; j < kNumInputs; ++j) {
    const double e = ua[j] - ref.u_ref[j];
    c += cfg.r_diag[j] * e * e;
  }
  return c;
}

inline double terminal_cost(const ChamberState& x, const ReferenceSample& ref,
                            const OcpConfig& cfg) {
  const double eT = x.T - ref.T_ref;
  const double eC = x.C - ref.C_ref;
  return cfg.p_T * eT * eT + cfg.p_C * eC * eC;
}

// nu - nu^2 for every relaxed binary channel, stage-major.
inline std::vector<double> relaxation_residuals(const std::vector<ControlInput>& u_seq) {
  std::vector<double> r;
  r.reserve(u_seq.size() * kBinaryInputIndices.size());
  for (const ControlInput& u : u_seq) {
    const auto ua = u.to_array();
    for (int b : kBinaryInputIndices) r.push_back(ua[b] - ua[b] * ua[b]);
  }
  return r;
}

struct OcpProblem {
  OcpConfig cfg;
  ModelParams params;
  ChamberState x0;
  std::vector<ReferenceSample> refs;  // horizon + 1 samples
  std::vector<Disturbance> dist;      // horizon samples, held over each stage
  StateBox state_box;
  Eigen::VectorXd lo, hi;             // per-variable bounds; lo == hi freezes

  int num_vars() const { return cfg.num_vars(); }
  int slack_index() const { return num_vars() - 1; }

  ControlInput input_at(const Eigen::VectorXd& z, int stage) const {
    std::array<double, kNumInputs> a{};
    for (int j = 0; j < kNumInputs; ++j) a[j] = z[stage * kNumInputs + j];
    return ControlInput::from_array(a);
  }

  std::vector<ControlInput> input_sequence(const Eigen::VectorXd& z) const {
    std::vector<ControlInput> seq;
    seq.reserve(cfg.horizon);
    for (int i = 0; i < cfg.horizon; ++i) seq.push_back(input_at(z, i));
    return seq;
  }

  Eigen::VectorXd project(Eigen::VectorXd z) const {
    for (int j = 0; j < z.size(); ++j) z[j] = std::min(std::max(z[j], lo[j]), hi[j]);
    return z;
  }

  // Reference-seeded feasible start with zero slack.
  Eigen::VectorXd default_start() const {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(num_vars());
    for (int i = 0; i < cfg.horizon; ++i)
      for (int j = 0; j < kNumInputs; ++j) z[i * kNumInputs + j] = refs[i].u_ref[j];
    return project(z);
  }

  struct Rollout {
    std::vector<ChamberState> states;  // horizon + 1
    std::vector<Mat77> A;              // discrete-time, per stage
    std::vector<Mat7x10> B;
  };

  Rollout rollout(const Eigen::VectorXd& z) const {
    Rollout r;
    r.states.reserve(cfg.horizon + 1);
    r.A.reserve(cfg.horizon);
    r.B.reserve(cfg.horizon);
    r.states.push_back(x0);
    for (int i = 0; i < cfg.horizon; ++i) {
      const SmoothStep s = smooth_step(r.states.back(), input_at(z, i), dist[i], cfg.dt,
                                       params, params.plant, cfg.smoothing);
      r.states.push_back(s.next);
      r.A.push_back(s.A);
      r.B.push_back(s.B);
    }
    return r;
  }

  int num_residuals() const {
    const int nb = static_cast<int>(kBinaryInputIndices.size());
    return cfg.horizon * (2 + kNumInputs) + 2 + 1 + 2 * kNumStates * cfg.horizon +
           nb * cfg.horizon;
  }

  struct ResidualSystem {
    Eigen::VectorXd r;
    Eigen::MatrixXd J;
    double value = 0.0;  // |r|^2
  };

  // Penalized objective as a residual system; merit(z, rho) == |r(z)|^2.
  // Pass rho = 0 to drop the relaxation rows and obtain the plain objective.
  ResidualSystem residual_system(const Eigen::VectorXd& z, double rho) const {
    const int n = num_vars();
    const int N = cfg.horizon;
    const int ieps = slack_index();
    const double eps = z[ieps];
    const Rollout ro = rollout(z);

    // Forward sensitivities of x_i w.r.t. the stacked inputs (eps never
    // enters the dynamics).  S[i] is 7 x (N*10); S[0] = 0 is implicit.
    std::vector<Eigen::Matrix<double, kNumStates, Eigen::Dynamic>> S(N + 1);
    Eigen::Matrix<double, kNumStates, Eigen::Dynamic> cur =
        Eigen::Matrix<double, kNumStates, Eigen::Dynamic>::Zero(kNumStates, N * kNumInputs);
    for (int i = 0; i < N; ++i) {
      cur = (ro.A[i] * cur).eval();
      cur.middleCols(i * kNumInputs, kNumInputs) += ro.B[i];
      S[i + 1] = cur;
    }

    ResidualSystem rs;
    rs.r = Eigen::VectorXd::Zero(num_residuals());
    rs.J = Eigen::MatrixXd::Zero(num_residuals(), n);
    int row = 0;

    const double sqT = std::sqrt(cfg.q_T);
    const double sqC = std::sqrt(cfg.q_C);
    for (int i = 0; i < N; ++i) {
      rs.r[row] = sqT * (ro.states[i].T - refs[i].T_ref);
      if (i > 0) rs.J.block(row, 0, 1, N * kNumInputs) = sqT * S[i].row(0);
      ++row;
      rs.r[row] = sqC * (ro.states[i].C - refs[i].C_ref);
      if (i > 0) rs.J.block(row, 0, 1, N * kNumInputs) = sqC * S[i].row(1);
      ++row;
      for (int j = 0; j < kNumInputs; ++j) {
        const double sr = std::sqrt(cfg.r_diag[j]);
        rs.r[row] = sr * (z[i * kNumInputs + j] - refs[i].u_ref[j]);
        rs.J(row, i * kNumInputs + j) = sr;
        ++row;
      }
    }

    const double spT = std::sqrt(cfg.p_T);
    const double spC = std::sqrt(cfg.p_C);
    rs.r[row] = spT * (ro.states[N].T - refs[N].T_ref);
    rs.J.block(row, 0, 1, N * kNumInputs) = spT * S[N].row(0);
    ++row;
    rs.r[row] = spC * (ro.states[N].C - refs[N].C_ref);
    rs.J.block(row, 0, 1, N * kNumInputs) = spC * S[N].row(1);
    ++row;

    rs.r[row] = std::sqrt(cfg.alpha) * eps;
    rs.J(row, ieps) = std::sqrt(cfg.alpha);
    ++row;

    // State box penalty rows for x_1..x_N.
    const double smu = std::sqrt(cfg.mu_box);
    for (int i = 1; i <= N; ++i) {
      const auto xa = ro.states[i].to_array();
      for (int j = 0; j < kNumStates; ++j) {
        const double width = 1e-3 * (state_box.hi[j] - state_box.lo[j]);
        const auto vlo = smooth_detail::smooth_max0(state_box.lo[j] - xa[j], width,
                                                    cfg.smoothing.sharpness);
        rs.r[row] = smu * vlo.v;
        rs.J.block(row, 0, 1, N * kNumInputs) = (-smu * vlo.d) * S[i].row(j);
        ++row;
        const auto vhi = smooth_detail::smooth_max0(xa[j] - state_box.hi[j], width,
                                                    cfg.smoothing.sharpness);
        rs.r[row] = smu * vhi.v;
        rs.J.block(row, 0, 1, N * kNumInputs) = (smu * vhi.d) * S[i].row(j);
        ++row;
      }
    }

    // Relaxed binary equalities nu - nu^2 - eps = 0, weighted by sqrt(rho).
    if (rho > 0.0) {
      const double srho = std::sqrt(rho);
      for (int i = 0; i < N; ++i) {
        for (int b : kBinaryInputIndices) {
          const int col = i * kNumInputs + b;
          const double nu = z[col];
          rs.r[row] = srho * (nu - nu * nu - eps);
          rs.J(row, col) = srho * (1.0 - 2.0 * nu);
          rs.J(row, ieps) = -srho;
          ++row;
        }
      }
    } else {
      row += N * static_cast<int>(kBinaryInputIndices.size());
    }

    rs.value = rs.r.squaredNorm();
    return rs;
  }

  double objective(const Eigen::VectorXd& z) const { return residual_system(z, 0.0).value; }

  double merit(const Eigen::VectorXd& z, double rho) const {
    return residual_system(z, rho).value;
  }

  Eigen::VectorXd merit_gradient(const Eigen::VectorXd& z, double rho) const {
    const ResidualSystem rs = residual_system(z, rho);
    return 2.0 * rs.J.transpose() * rs.r;
  }
};

inline OcpProblem build_ocp(const ChamberState& x0, const std::vector<ReferenceSample>& refs,
                            const std::vector<Disturbance>& dist, const ModelParams& params,
                            const OcpConfig& cfg = {}) {
  cfg.validate();
  if (static_cast<int>(refs.size()) != cfg.horizon + 1)
    throw std::invalid_argument("ocp: need horizon+1 reference samples");
  if (static_cast<int>(dist.size()) != cfg.horizon)
    throw std::invalid_argument("ocp: need horizon disturbance samples");

  OcpProblem pb;
  pb.cfg = cfg;
  pb.params = params;
  pb.x0 = x0;
  pb.refs = refs;
  pb.dist = dist;

  const InputBox ubox;
  const int n = cfg.num_vars();
  pb.lo = Eigen::VectorXd::Zero(n);
  pb.hi = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < cfg.horizon; ++i)
    for (int j = 0; j < kNumInputs; ++j) {
      pb.lo[i * kNumInputs + j] = ubox.lo[j];
      pb.hi[i * kNumInputs + j] = ubox.hi[j];
    }
  pb.lo[n - 1] = 0.0;
  pb.hi[n - 1] = cfg.slack_max;
  return pb;
}

}  // namespace phyto
