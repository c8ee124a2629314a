#include "srfine/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace srfine;

namespace {

Eigen::VectorXd noisy_instance(int N, int flo, int spikes, double level, std::uint64_t seed, GridSignal* truth = nullptr) {
  SignalRequest rq;
  rq.seed = seed;
  rq.N = N;
  rq.flo = flo;
  rq.spikes = spikes;
  const auto g = generate_signal(rq);
  if (truth) *truth = g.signal;
  LowPassOperator op(N, flo);
  return add_noise(apply_lowpass(op, g.signal.values), NoiseModel::l1_budget, level, seed + 17).y;
}

}  // namespace

TEST_CASE("dense operator") {
  LowPassOperator op(8, 3);
  const auto Q = materialize_q(op);
  CHECK((Q - Q.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((Q * Q - Q).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(Q.trace() == doctest::Approx(7.0));

  LowPassOperator op2(32, 5);
  const auto Q2 = materialize_q(op2);
  for (int n : {0, 3, 17}) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(32);
    e(n) = 1.0;
    CHECK((Q2.col(n) - apply_lowpass(op2, e)).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(materialize_q(LowPassOperator(1024, 8)), std::invalid_argument);
}

TEST_CASE("feasible dual construction") {
  std::mt19937_64 rng(21);
  LowPassOperator op(64, 7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd w(64);
    for (auto& v : w) v = u(rng);
    const auto v = feasible_dual(w, apply_lowpass(op, w));
    CHECK(v.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
    CHECK(apply_lowpass(op, v).maxCoeff() <= 1e-12);
  }
}

TEST_CASE("first-order solver: zero data") {
  LowPassOperator op(32, 5);
  const auto rep = solve_cvx(Eigen::VectorXd::Zero(32), op);
  CHECK(rep.converged);
  CHECK(rep.objective == 0.0);
  CHECK(rep.xhat.values.isZero(0.0));
  CHECK_THROWS_AS(solve_cvx(Eigen::VectorXd::Zero(16), op), std::invalid_argument);
}

TEST_CASE("first-order solver: noiseless single spike is recovered exactly") {
  LowPassOperator op(64, 16);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(64);
  x(23) = 1.3;
  const auto rep = solve_cvx(apply_lowpass(op, x), op);
  CHECK(rep.converged);
  CHECK(rep.objective <= 1e-8);
  CHECK((rep.xhat.values - x).lpNorm<1>() <= 1e-6);
}

TEST_CASE("first-order solver: noiseless well-separated spikes") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    GridSignal x;
    LowPassOperator op(64, 16);
    SignalRequest rq;
    rq.seed = 40 + s;
    rq.N = 64;
    rq.flo = 16;
    rq.spikes = 3;
    rq.kappa_mult = 2.0;
    x = generate_signal(rq).signal;
    const auto rep = solve_cvx(apply_lowpass(op, x.values), op);
    CHECK(rep.converged);
    CHECK((rep.xhat.values - x.values).lpNorm<1>() <= 1e-6 * x.values.lpNorm<1>());
  }
}

TEST_CASE("first-order solver contracts") {
  LowPassOperator op(32, 8);
  const auto y = noisy_instance(32, 8, 3, 0.1, 5);
  const auto rep = solve_cvx(y, op);
  CHECK(rep.xhat.values.minCoeff() >= 0.0);
  CHECK(rep.max_feasibility_violation <= 1e-12);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& h : rep.history) {
    CHECK(h.best_objective <= best);
    best = h.best_objective;
    CHECK(h.dual_objective <= h.best_objective + 1e-12);  // weak duality
  }
  // determinism
  const auto again = solve_cvx(y, op);
  CHECK(again.objective == rep.objective);
  CHECK(again.xhat.values == rep.xhat.values);
}

TEST_CASE("first-order solver reports non-convergence") {
  LowPassOperator op(256, 20);
  const auto y = noisy_instance(256, 20, 4, 0.2, 9);
  SolverConfig cfg;
  cfg.max_iters = 50;
  const auto rep = solve_cvx(y, op, cfg);
  CHECK_FALSE(rep.converged);
  CHECK(rep.iterations == 50);
  cfg.primal_step = 2.0;
  CHECK_THROWS_AS(solve_cvx(y, op, cfg), std::invalid_argument);
}

TEST_CASE("simplex on a textbook problem") {
  // min -x1 - x2 s.t. x1 + 2 x2 + s1 = 4, 3 x1 + x2 + s2 = 6
  Eigen::MatrixXd A(2, 4);
  A << 1, 2, 1, 0, 3, 1, 0, 1;
  Eigen::VectorXd b(2), c(4);
  b << 4, 6;
  c << -1, -1, 0, 0;
  const auto res = simplex_solve(A, b, c, 100);
  REQUIRE(res.status == LpResult::Status::optimal);
  CHECK(res.objective == doctest::Approx(-2.8));
  CHECK(res.x(0) == doctest::Approx(1.6));
  CHECK(res.x(1) == doctest::Approx(1.2));

  Eigen::MatrixXd Ai(1, 2);
  Ai << 1, 1;
  Eigen::VectorXd bi(1), ci(2);
  bi << -1;
  ci << 1, 1;
  CHECK(simplex_solve(Ai, bi, ci, 10).status == LpResult::Status::infeasible);

  Eigen::MatrixXd Au(1, 2);
  Au << 1, -1;
  Eigen::VectorXd bu(1), cu(2);
  bu << 0;
  cu << -1, 0;
  CHECK(simplex_solve(Au, bu, cu, 10).status == LpResult::Status::unbounded);
}

TEST_CASE("simplex survives a cycling-prone problem") {
  // Beale's example cycles under Dantzig's rule with lowest-index ties.
  Eigen::MatrixXd A(3, 7);
  A << 0.25, -8, -1, 9, 1, 0, 0,  //
      0.5, -12, -0.5, 3, 0, 1, 0,  //
      0, 0, 1, 0, 0, 0, 1;
  Eigen::VectorXd b(3), c(7);
  b << 0, 0, 1;
  c << -0.75, 20, -0.5, 6, 0, 0, 0;
  const auto res = simplex_solve(A, b, c, 3);
  REQUIRE(res.status == LpResult::Status::optimal);
  CHECK(res.objective == doctest::Approx(-1.25));
}

TEST_CASE("reference LP: small cases") {
  LowPassOperator op(4, 1);
  const auto Q = materialize_q(op);
  const auto z = solve_reference_lp(Eigen::VectorXd::Zero(4), Q);
  CHECK(z.objective == doctest::Approx(0.0));
  CHECK(z.xhat.cwiseAbs().maxCoeff() < 1e-12);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
  x(1) = 1.0;
  const auto r = solve_reference_lp(Q * x, Q);
  CHECK(r.objective <= 1e-9);
  // Q has rank 3 with null space spanned by (1,-1,1,-1); nonnegativity pins the single spike.
  CHECK((r.xhat - x).cwiseAbs().maxCoeff() < 1e-9);

  CHECK_THROWS_AS(solve_reference_lp(Eigen::VectorXd::Zero(130), Eigen::MatrixXd::Zero(130, 130)),
                  std::invalid_argument);
}

TEST_CASE("first-order and simplex agree on noisy instances") {
  for (std::uint64_t s = 0; s < 8; ++s) {
    LowPassOperator op(32, 8);
    const auto y = noisy_instance(32, 8, 3, 0.1, 100 + s);
    const auto ref = solve_reference_lp(y, materialize_q(op));
    const auto fo = solve_cvx(y, op);
    CHECK(fo.converged);
    CHECK(std::abs(fo.objective - ref.objective) <= 1e-6 * (1 + y.lpNorm<1>()));
    // the simplex vertex is primal feasible with the objective it reports
    CHECK(ref.xhat.minCoeff() >= -1e-12);
    CHECK(std::abs((y - materialize_q(op) * ref.xhat).lpNorm<1>() - ref.objective) < 1e-9);
  }
}
