#pragma once

// Projected Levenberg-Marquardt solver for the relaxed-binary OCP.  The
// binary equalities are driven in by a quadratic penalty whose weight rho
// sweeps a fixed schedule: soft phases let the tracking objective pick each
// vertex, stiff phases pin the binaries.  Every accepted solve finishes
// stationary at the stiffest weight, so it is a fixed point: re-solving warm
// from it returns it unchanged.  Fully deterministic.
//
// Stationarity is the largest gradient cosine |g_j| / (2 |J_j| |r|) over
// coordinates not pinned outward at a bound.  The Hessian diagonal spans
// twelve orders of magnitude here, so an unscaled gradient or displacement
// test would demand merit changes far below one ulp from coordinates that
// already sit at their optimum to machine precision in z-space.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "phytotron/ocp.hpp"

namespace phyto {

struct OcpSolution {
  std::vector<ControlInput> inputs;            // horizon entries
  std::vector<ChamberState> predicted_states;  // horizon + 1 entries
  Eigen::VectorXd z;                           // raw decision vector
  double eps_star = 0.0;                       // shared relaxation slack
  double objective = 0.0;                      // penalty-free objective at z
  double merit = 0.0;                          // |r|^2 at the final rho
  double stationarity = 0.0;                   // max gradient cosine, free coords
  double max_binary_gap = 0.0;                 // distance to the nearest vertex
  double rho_final = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<std::pair<double, double>> trace;  // (rho, merit) per accepted step
};

namespace solver_detail {

inline double binary_gap(const OcpProblem& pb, const Eigen::VectorXd& z) {
  double gap = 0.0;
  for (int i = 0; i < pb.cfg.horizon; ++i)
    for (int b : kBinaryInputIndices) {
      const double nu = z[i * kNumInputs + b];
      gap = std::max(gap, std::abs(nu - std::round(nu)));
    }
  return gap;
}

}  // namespace solver_detail

inline OcpSolution solve_ocp(const OcpProblem& pb, const Eigen::VectorXd* warm_start = nullptr) {
  using solver_detail::binary_gap;

  const OcpConfig& cfg = pb.cfg;
  const int n = pb.num_vars();
  const bool warm = warm_start != nullptr && warm_start->size() == n;
  Eigen::VectorXd z = warm ? pb.project(*warm_start) : pb.default_start();

  OcpSolution sol;
  double value = 0.0;
  double stationarity = 0.0;
  int iters = 0;
  bool stationary = false;
  bool fast_path = false;
  double rho = cfg.rho_init;

  // Largest gradient cosine over coordinates that are free to move: bound
  // coordinates whose gradient points outward are at their constrained
  // optimum and contribute nothing.
  const auto gradient_cosine = [&](const Eigen::VectorXd& zz,
                                   const OcpProblem::ResidualSystem& rs,
                                   const Eigen::VectorXd& grad) {
    const double rn = rs.r.norm();
    if (rn == 0.0) return 0.0;
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      if (pb.lo[j] == pb.hi[j]) continue;
      if (zz[j] <= pb.lo[j] && grad[j] > 0.0) continue;
      if (zz[j] >= pb.hi[j] && grad[j] < 0.0) continue;
      const double cn = rs.J.col(j).norm();
      if (cn > 0.0) worst = std::max(worst, std::abs(grad[j]) / (2.0 * cn * rn));
    }
    return worst;
  };

  // Fast path: a warm start that already satisfies the full contract at the
  // stiffest penalty is a fixed point and is returned unchanged.
  if (warm) {
    const OcpProblem::ResidualSystem rs = pb.residual_system(z, cfg.rho_max);
    const Eigen::VectorXd grad = 2.0 * rs.J.transpose() * rs.r;
    stationarity = gradient_cosine(z, rs, grad);
    if (stationarity <= cfg.stationarity_tol && z[pb.slack_index()] <= cfg.eps_tol &&
        binary_gap(pb, z) <= cfg.gap_tol) {
      rho = cfg.rho_max;
      value = rs.value;
      stationary = true;
      fast_path = true;
    }
  }

  // Minimize the merit at fixed rho until the gradient cosine drops below
  // tol, a stall, or the shared iteration cap.
  //
  // Each iteration is a projected Levenberg-Marquardt step: the damped
  // least-squares subproblem is solved by QR on the stacked Jacobian
  // (squaring into J^T J would double the condition exponent, fatal next to
  // the stiff penalty rows), the trial point is the box projection of z + p,
  // and the damping rises until the trial strictly decreases the merit.
  // Strictness matters: with an ulp-sized Armijo margin the solver would
  // happily walk level sets until the iteration cap.
  const auto minimize_at = [&](double rho_now, double tol) {
    constexpr double c1 = 1e-4;
    stationary = false;
    double lambda = 0.0;
    value = pb.merit(z, rho_now);
    while (iters < cfg.max_iterations) {
      const OcpProblem::ResidualSystem rs = pb.residual_system(z, rho_now);
      value = rs.value;
      const Eigen::VectorXd grad = 2.0 * rs.J.transpose() * rs.r;

      stationarity = gradient_cosine(z, rs, grad);
      if (stationarity <= tol) {
        stationary = true;
        return;
      }

      // Active-set reduction: drop coordinates pinned at a bound with the
      // gradient pushing outward, and frozen coordinates (lo == hi).
      std::vector<int> free;
      free.reserve(n);
      for (int j = 0; j < n; ++j) {
        if (pb.lo[j] == pb.hi[j]) continue;
        if (z[j] <= pb.lo[j] && grad[j] > 0.0) continue;
        if (z[j] >= pb.hi[j] && grad[j] < 0.0) continue;
        free.push_back(j);
      }
      if (free.empty()) return;  // fully pinned yet not stationary: give up

      const int m = static_cast<int>(free.size());
      const int rows = static_cast<int>(rs.J.rows());
      Eigen::MatrixXd Jf(rows + m, m);
      Eigen::VectorXd rhs(rows + m);
      for (int k = 0; k < m; ++k) Jf.col(k).head(rows) = rs.J.col(free[k]);
      rhs.head(rows) = -rs.r;
      rhs.tail(m).setZero();
      // Damping scale per column keeps the step meaningful across the wildly
      // different natural units of the decision variables.
      Eigen::VectorXd cn(m);
      for (int k = 0; k < m; ++k)
        cn[k] = std::max(Jf.col(k).head(rows).norm(), 1e-12);

      ++iters;
      bool accepted = false;
      for (int attempt = 0; attempt < 30; ++attempt) {
        Jf.bottomRows(m).setZero();
        const double sl = std::sqrt(lambda);
        for (int k = 0; k < m; ++k) Jf(rows + k, k) = sl * cn[k];
        const Eigen::VectorXd pf = Jf.colPivHouseholderQr().solve(rhs);
        if (pf.allFinite()) {
          Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
          for (int k = 0; k < m; ++k) p[free[k]] = pf[k];
          const Eigen::VectorXd zt = pb.project(z + p);
          const double pred = grad.dot(zt - z);
          if (pred < 0.0) {
            // Merit change as a cancellation-free difference of residual
            // vectors; straight |r|^2 comparison cannot certify decreases
            // below one ulp of the total and would stall the polish.
            const Eigen::VectorXd rt = pb.residual_system(zt, rho_now).r;
            double delta = 0.0;
            for (int i = 0; i < rt.size(); ++i)
              delta += (rt[i] - rs.r[i]) * (rt[i] + rs.r[i]);
            if (delta < 0.0 && delta <= c1 * pred) {
              z = zt;
              value += delta;
              accepted = true;
              lambda = lambda > 1e-10 ? lambda * 0.25 : 0.0;
              break;
            }
          }
        }
        lambda = lambda == 0.0 ? 1e-4 : lambda * 4.0;
      }
      if (!accepted) return;  // no certifiable descent left at this rho
      sol.trace.emplace_back(rho_now, value);
    }
  };

  if (!fast_path) {
    // Penalty continuation over the fixed schedule, always ending at rho_max.
    // Interior phases only steer the binaries toward a vertex basin, so a
    // loose tolerance suffices; the final phase owns the contract.
    const double soft_tol = std::max(1e-3, cfg.stationarity_tol);
    while (true) {
      minimize_at(rho, rho >= cfg.rho_max ? cfg.stationarity_tol : soft_tol);
      if (rho >= cfg.rho_max || iters >= cfg.max_iterations) break;
      rho = std::min(rho * cfg.rho_growth, cfg.rho_max);
    }

    // Vertex polish: snap each near-vertex binary, zero the slack, and keep
    // the snapped point if it lowers the merit.
    Eigen::VectorXd zs = z;
    bool snapped = false;
    for (int i = 0; i < cfg.horizon; ++i)
      for (int b : kBinaryInputIndices) {
        const int col = i * kNumInputs + b;
        const double vertex = std::round(zs[col]);
        if (vertex < pb.lo[col] || vertex > pb.hi[col]) continue;
        if (zs[col] != vertex && std::abs(zs[col] - vertex) <= 0.05) {
          zs[col] = vertex;
          snapped = true;
        }
      }
    const int ieps = pb.slack_index();
    if (zs[ieps] != 0.0 && pb.lo[ieps] <= 0.0) {
      zs[ieps] = 0.0;
      snapped = true;
    }
    if (snapped && pb.merit(zs, rho) < value) {
      z = zs;
      minimize_at(rho, cfg.stationarity_tol);
      sol.trace.emplace_back(rho, value);
    }
  }

  sol.z = z;
  sol.inputs = pb.input_sequence(z);
  sol.predicted_states = pb.rollout(z).states;
  sol.eps_star = z[pb.slack_index()];
  sol.objective = pb.objective(z);
  sol.merit = value;
  sol.stationarity = stationarity;
  sol.max_binary_gap = binary_gap(pb, z);
  sol.rho_final = rho;
  sol.iterations = iters;
  sol.converged = stationary && rho >= cfg.rho_max && sol.eps_star <= cfg.eps_tol &&
                  sol.max_binary_gap <= cfg.gap_tol;
  return sol;
}

}  // namespace phyto
