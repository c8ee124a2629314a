#include "srfine/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace srfine {

Eigen::VectorXd feasible_dual(const Eigen::VectorXd& w, const Eigen::VectorXd& Qw) {
  const double shift = std::max(0.0, Qw.maxCoeff());
  return (w.array() - shift).matrix() / (1.0 + shift);
}

SolveReport solve_cvx(const Eigen::VectorXd& y, const LowPassOperator& op, const SolverConfig& cfg) {
  const int N = op.N();
  if (y.size() != N) throw std::invalid_argument("solve_cvx: length mismatch");
  if (cfg.primal_step * cfg.dual_step > 1.0) throw std::invalid_argument("solve_cvx: step product must not exceed 1");
  if (cfg.check_interval < 1 || cfg.max_iters < 0) throw std::invalid_argument("solve_cvx: bad iteration settings");
  if (!(cfg.primal_weight > 0.0)) throw std::invalid_argument("solve_cvx: primal weight must be positive");

  LowPassWorkspace ws(op);
  const double y1 = y.lpNorm<1>();
  double omega = cfg.primal_weight;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(N), xbar = x, w = x;
  Eigen::VectorXd xavg = x, wavg = x, xanchor = x, wanchor = x;
  Eigen::VectorXd Qv(N), xnew(N);

  // primal objective and certified gap of a candidate pair
  auto measure = [&](const Eigen::VectorXd& xx, const Eigen::VectorXd& ww) {
    ws.apply(xx, Qv);
    const double obj = (y - Qv).lpNorm<1>();
    ws.apply(ww, Qv);
    const double dual = feasible_dual(ww, Qv).dot(y);
    return std::array<double, 2>{obj, dual};
  };

  SolveReport rep;
  rep.xhat.N = N;
  Eigen::VectorXd xbest = x;
  double prev_obj = std::numeric_limits<double>::infinity();
  double best = prev_obj;
  double gap_at_restart = std::numeric_limits<double>::infinity();
  int since_restart = 0;
  int it = 0;
  while (it < cfg.max_iters) {
    const double tau = cfg.primal_step / omega, sigma = cfg.dual_step * omega;
    ws.apply(xbar, Qv);
    w = (w + sigma * (y - Qv)).cwiseMax(-1.0).cwiseMin(1.0);
    ws.apply(w, Qv);
    xnew = (x + tau * Qv).cwiseMax(0.0);
    xbar = 2.0 * xnew - x;
    x.swap(xnew);
    ++it;
    ++since_restart;
    xavg += (x - xavg) / since_restart;
    wavg += (w - wavg) / since_restart;

    if (it % cfg.check_interval == 0 || it == cfg.max_iters) {
      const auto cur = measure(x, w);
      const auto avg = measure(xavg, wavg);
      const bool use_avg = avg[0] - avg[1] < cur[0] - cur[1];
      const double obj = use_avg ? avg[0] : cur[0];
      const double dual = std::max(cur[1], avg[1]);  // both duals are feasible
      const double gap = obj - dual;
      if (obj < best) {
        best = obj;
        xbest = use_avg ? xavg : x;
      }
      if (cfg.keep_history) rep.history.push_back({it, obj, best, dual, best - dual});
      const bool stagnant = std::abs(obj - prev_obj) <= cfg.tol_obj * (1.0 + obj);
      prev_obj = obj;
      rep.objective = best;
      rep.dual_objective = std::max(rep.dual_objective, dual);
      if (stagnant && best - rep.dual_objective <= cfg.tol_gap * (1.0 + y1)) {
        rep.converged = true;
        break;
      }
      if (cfg.restart && (gap <= cfg.restart_factor * gap_at_restart || since_restart >= cfg.restart_period)) {
        if (use_avg) {
          x = xavg;
          w = wavg;
        }
        if (cfg.adaptive_weight) {
          const double dx = (x - xanchor).norm(), dw = (w - wanchor).norm();
          if (dx > 1e-12 && dw > 1e-12) omega = std::exp(0.5 * std::log(dw / dx) + 0.5 * std::log(omega));
        }
        xbar = x;
        xanchor = x;
        wanchor = w;
        xavg = x;
        wavg = w;
        since_restart = 0;
        gap_at_restart = gap;
      }
    }
  }
  if (it == 0) {
    ws.apply(x, Qv);
    rep.objective = (y - Qv).lpNorm<1>();
    rep.converged = rep.objective <= cfg.tol_gap * (1.0 + y1);
  }
  rep.iterations = it;
  rep.max_feasibility_violation = std::max(0.0, -xbest.minCoeff());
  if (rep.max_feasibility_violation > cfg.tol_feas) rep.converged = false;
  rep.xhat.values = xbest.cwiseMax(0.0);
  return rep;
}

namespace {

struct Tableau {
  // rows 0..m-1 are constraints; column `cols` holds the right-hand side
  Eigen::MatrixXd T;
  std::vector<int> basis;
  int m, cols;
};

// Pivot rules: Dantzig until `degenerate_limit` consecutive degenerate pivots, then Bland.
LpResult::Status run_simplex(Tableau& tb, const Eigen::VectorXd& cost, const std::vector<char>& allowed,
                             int degenerate_limit, int& pivots, bool& bland_used) {
  const double eps = 1e-11;
  const int m = tb.m, n = tb.cols;
  const int max_pivots = 50 * (m + n) + 1000;
  int degenerate_run = 0;
  bool bland = false;
  Eigen::RowVectorXd reduced(n);
  while (pivots < max_pivots) {
    // reduced costs c_j - c_B^T B^{-1} A_j read off the tableau
    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i) cb(i) = cost(tb.basis[i]);
    reduced = cost.transpose() - cb.transpose() * tb.T.leftCols(n);
    int enter = -1;
    double most = -eps;
    for (int j = 0; j < n; ++j) {
      if (!allowed[j] || reduced(j) >= -eps) continue;
      if (bland) {
        enter = j;
        break;
      }
      if (reduced(j) < most) {
        most = reduced(j);
        enter = j;
      }
    }
    if (enter < 0) return LpResult::Status::optimal;

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double a = tb.T(i, enter);
      if (a <= eps) continue;
      const double ratio = tb.T(i, n) / a;
      if (ratio < best_ratio - 1e-14 ||
          (std::abs(ratio - best_ratio) <= 1e-14 && leave >= 0 && tb.basis[i] < tb.basis[leave])) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave < 0) return LpResult::Status::unbounded;

    degenerate_run = best_ratio <= eps ? degenerate_run + 1 : 0;
    if (!bland && degenerate_run >= degenerate_limit) {
      bland = true;
      bland_used = true;
    }

    const double piv = tb.T(leave, enter);
    tb.T.row(leave) /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double f = tb.T(i, enter);
      if (f != 0.0) tb.T.row(i) -= f * tb.T.row(leave);
    }
    tb.basis[leave] = enter;
    ++pivots;
  }
  return LpResult::Status::iteration_limit;
}

}  // namespace

LpResult simplex_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                       int degenerate_limit) {
  const int m = int(A.rows()), n = int(A.cols());
  if (b.size() != m || c.size() != n) throw std::invalid_argument("simplex_solve: dimension mismatch");
  LpResult res;

  // phase one: artificials a_i with rows flipped so that b >= 0
  Tableau tb;
  tb.m = m;
  tb.cols = n + m;
  tb.T = Eigen::MatrixXd::Zero(m, n + m + 1);
  for (int i = 0; i < m; ++i) {
    const double s = b(i) < 0 ? -1.0 : 1.0;
    tb.T.row(i).head(n) = s * A.row(i);
    tb.T(i, n + i) = 1.0;
    tb.T(i, n + m) = s * b(i);
  }
  tb.basis.resize(m);
  for (int i = 0; i < m; ++i) tb.basis[i] = n + i;

  Eigen::VectorXd cost1 = Eigen::VectorXd::Zero(n + m);
  cost1.tail(m).setOnes();
  std::vector<char> allowed(n + m, 1);
  auto st = run_simplex(tb, cost1, allowed, degenerate_limit, res.pivots, res.bland_used);
  if (st != LpResult::Status::optimal) {
    res.status = st;
    return res;
  }
  double infeas = 0.0;
  for (int i = 0; i < m; ++i)
    if (tb.basis[i] >= n) infeas += tb.T(i, n + m);
  if (infeas > 1e-9 * (1.0 + b.lpNorm<1>())) {
    res.status = LpResult::Status::infeasible;
    return res;
  }
  // drive zero-level artificials out of the basis where a structural pivot exists
  for (int i = 0; i < m; ++i) {
    if (tb.basis[i] < n) continue;
    int j = 0;
    while (j < n && std::abs(tb.T(i, j)) <= 1e-9) ++j;
    if (j == n) continue;  // redundant row
    const double piv = tb.T(i, j);
    tb.T.row(i) /= piv;
    for (int k = 0; k < m; ++k)
      if (k != i && tb.T(k, j) != 0.0) tb.T.row(k) -= tb.T(k, j) * tb.T.row(i);
    tb.basis[i] = j;
    ++res.pivots;
  }

  // phase two: artificials may not re-enter
  Eigen::VectorXd cost2 = Eigen::VectorXd::Zero(n + m);
  cost2.head(n) = c;
  for (int j = n; j < n + m; ++j) allowed[j] = 0;
  st = run_simplex(tb, cost2, allowed, degenerate_limit, res.pivots, res.bland_used);
  res.status = st;
  if (st != LpResult::Status::optimal) return res;

  // refine the basic solution with a fresh LU solve on the original columns
  std::vector<int> structural_rows, structural_cols;
  for (int i = 0; i < m; ++i)
    if (tb.basis[i] < n) {
      structural_rows.push_back(i);
      structural_cols.push_back(tb.basis[i]);
    }
  res.x = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < structural_rows.size(); ++k)
    res.x(structural_cols[k]) = tb.T(structural_rows[k], n + m);
  if (int(structural_cols.size()) == m) {
    Eigen::MatrixXd B(m, m);
    for (int k = 0; k < m; ++k) B.col(k) = A.col(structural_cols[k]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    const Eigen::VectorXd xb = lu.solve(b);
    if ((B * xb - b).lpNorm<Eigen::Infinity>() <= 1e-9 * (1.0 + b.lpNorm<Eigen::Infinity>()) && xb.minCoeff() >= -1e-9)
      for (int k = 0; k < m; ++k) res.x(structural_cols[k]) = std::max(0.0, xb(k));
  }
  res.objective = c.dot(res.x);
  return res;
}

ReferenceSolution solve_reference_lp(const Eigen::VectorXd& y, const Eigen::MatrixXd& Q) {
  const int N = int(y.size());
  if (N > 128) throw std::invalid_argument("solve_reference_lp: N must not exceed 128");
  if (Q.rows() != N || Q.cols() != N) throw std::invalid_argument("solve_reference_lp: Q must be N x N");
  Eigen::MatrixXd A(N, 3 * N);
  A << Q, Eigen::MatrixXd::Identity(N, N), -Eigen::MatrixXd::Identity(N, N);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(3 * N);
  c.tail(2 * N).setOnes();
  const auto lp = simplex_solve(A, y, c, 10 * 3 * N);
  if (lp.status != LpResult::Status::optimal) throw std::runtime_error("solve_reference_lp: simplex did not reach optimality");
  ReferenceSolution out;
  out.xhat = lp.x.head(N);
  out.objective = (y - Q * out.xhat).lpNorm<1>();
  out.bland_used = lp.bland_used;
  out.pivots = lp.pivots;
  return out;
}

Eigen::MatrixXd materialize_q(const LowPassOperator& op) {
  const int N = op.N(), flo = op.flo();
  if (N > 512) throw std::invalid_argument("materialize_q: N must not exceed 512");
  Eigen::VectorXd row0(N);
  row0(0) = double(2 * flo + 1) / N;
  for (int d = 1; d < N; ++d) {
    const double a = std::numbers::pi * d / N;
    row0(d) = std::sin((2 * flo + 1) * a) / (N * std::sin(a));
  }
  Eigen::MatrixXd Q(N, N);
  for (int m = 0; m < N; ++m)
    for (int n = 0; n < N; ++n) Q(m, n) = row0(((m - n) % N + N) % N);
  return Q;
}

}  // namespace srfine
