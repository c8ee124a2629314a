#pragma once

#include "srfine/signal_model.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace srfine {

struct SolverConfig {
  int max_iters = 400000;
  double primal_step = 0.99;
  double dual_step = 0.99;
  double tol_obj = 1e-9;   // relative objective change between checks
  double tol_gap = 1e-10;  // duality gap relative to 1 + ||y||_1
  double tol_feas = 1e-12;
  int check_interval = 100;
  bool keep_history = true;
  // Restarts to the better of the current and averaged iterate once the gap has
  // dropped by restart_factor, or after restart_period iterations.
  bool restart = true;
  double restart_factor = 0.2;
  int restart_period = 20000;
  // Step sizes become primal_step/omega and dual_step*omega; omega is re-estimated
  // at each restart from the primal and dual travel when adaptive_weight is set.
  double primal_weight = 1.0;
  bool adaptive_weight = true;
};

struct HistoryPoint {
  int iteration;
  double objective;
  double best_objective;
  double dual_objective;
  double gap;
};

struct SolveReport {
  GridSignal xhat;
  double objective = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double max_feasibility_violation = 0.0;
  std::vector<HistoryPoint> history;
};

// min ||y - Qx||_1 s.t. x >= 0 by primal-dual splitting on
// min_{x>=0} max_{|w|<=1} <w, y - Qx>, with Q applied through the FFT.
SolveReport solve_cvx(const Eigen::VectorXd& y, const LowPassOperator& op, const SolverConfig& cfg = {});

// Feasible dual point built from any w: shift by max(Qw)_+ then rescale.
// Uses Q1 = 1, so the result satisfies Qw <= 0 and |w| <= 1.
Eigen::VectorXd feasible_dual(const Eigen::VectorXd& w, const Eigen::VectorXd& Qw);

struct LpResult {
  enum class Status { optimal, infeasible, unbounded, iteration_limit };
  Status status = Status::optimal;
  Eigen::VectorXd x;
  double objective = 0.0;
  int pivots = 0;
  bool bland_used = false;
};

// min c^T x s.t. A x = b, x >= 0 by a dense two-phase tableau simplex.
// Switches to Bland's rule after `degenerate_limit` consecutive degenerate pivots.
LpResult simplex_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                       int degenerate_limit);

struct ReferenceSolution {
  Eigen::VectorXd xhat;
  double objective = 0.0;
  bool bland_used = false;
  int pivots = 0;
};

// min 1^T(u+v) s.t. Qx + u - v = y with x, u, v >= 0; N <= 128.
ReferenceSolution solve_reference_lp(const Eigen::VectorXd& y, const Eigen::MatrixXd& Q_dense);

// Dense Q with Q(m,n) = Dirichlet kernel of order flo at (m-n)/N; N <= 512.
Eigen::MatrixXd materialize_q(const LowPassOperator& op);

}  // namespace srfine
