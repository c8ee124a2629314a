#include "srfine/signal_model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace srfine;

namespace {

Eigen::VectorXd random_vector(int N, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXd v(N);
  for (auto& x : v) x = g(rng);
  return v;
}

// Mask oracle: explicit DFT, zero the high bins, inverse DFT, all as plain loops.
Eigen::VectorXd dft_mask(const Eigen::VectorXd& x, int flo) {
  const int N = int(x.size());
  const double pi = std::numbers::pi;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(N);
  for (int k = -flo; k <= flo; ++k) {
    std::complex<double> X = 0.0;
    for (int n = 0; n < N; ++n) X += x(n) * std::exp(std::complex<double>(0, -2 * pi * k * n / N));
    for (int n = 0; n < N; ++n) out(n) += (X * std::exp(std::complex<double>(0, 2 * pi * k * n / N))).real() / N;
  }
  return out;
}

bool brute_window_ok(const std::vector<double>& pts, double d, int r) {
  // every half-open window [p, p+d) starting at a point holds at most r points
  for (double a : pts) {
    int cnt = 0;
    for (double b : pts) {
      double off = b - a;
      off -= std::floor(off);
      if (off < d - 1e-12) ++cnt;
    }
    if (cnt > r) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("wrap-around distances") {
  CHECK(wrap_distance(0.05, 0.95) == doctest::Approx(0.1));
  CHECK(wrap_distance(0.2, 0.7) == doctest::Approx(0.5));
  CHECK(wrap_difference(0.95, 0.05) == doctest::Approx(-0.1));
  CHECK(wrap_difference(0.05, 0.95) == doctest::Approx(0.1));
  CHECK(min_separation({0.1}) == 1.0);
  CHECK(min_separation({0.1, 0.3, 0.95}) == doctest::Approx(0.15));
}

TEST_CASE("low-pass operator validation") {
  CHECK_THROWS_AS(LowPassOperator(15, 4), std::invalid_argument);
  CHECK_THROWS_AS(LowPassOperator(16, 8), std::invalid_argument);
  CHECK_THROWS_AS(LowPassOperator(16, 0), std::invalid_argument);
  CHECK_NOTHROW(LowPassOperator(16, 7));
  CHECK_THROWS_AS(apply_lowpass(LowPassOperator(16, 4), Eigen::VectorXd::Zero(8)), std::invalid_argument);
}

TEST_CASE("low-pass keeps constants and is a projection") {
  LowPassOperator op(64, 9);
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(64, 2.5);
  CHECK((apply_lowpass(op, c) - c).cwiseAbs().maxCoeff() < 1e-13);

  std::mt19937_64 rng(11);
  for (int i = 0; i < 5; ++i) {
    const auto x = random_vector(64, rng), y = random_vector(64, rng);
    const auto qx = apply_lowpass(op, x), qy = apply_lowpass(op, y);
    CHECK((apply_lowpass(op, qx) - qx).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(qx.dot(y) - x.dot(qy)) < 1e-10);
    CHECK(qx.norm() <= x.norm() * (1 + 1e-12));
    CHECK((qx - dft_mask(x, 9)).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("low-pass of a unit spike is the Dirichlet kernel") {
  LowPassOperator op(16, 4);
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(16);
  e0(0) = 1.0;
  const auto q = apply_lowpass(op, e0);
  const double pi = std::numbers::pi;
  CHECK(q(0) == doctest::Approx(9.0 / 16));
  for (int n = 1; n < 16; ++n) CHECK(q(n) == doctest::Approx(std::sin(9 * pi * n / 16) / (16 * std::sin(pi * n / 16))));
}

TEST_CASE("Rayleigh check: simple cases") {
  SupportSet T{10, {2, 7}};
  auto rep = check_rayleigh(T, {0.4, 1});
  CHECK(rep.regular);
  REQUIRE(rep.partition);
  CHECK(rep.partition->size() == 1);
  CHECK((*rep.partition)[0] == std::vector<int>{2, 7});

  SupportSet single{64, {5}};
  CHECK(check_rayleigh(single, {0.9, 1}).regular);
  CHECK(check_rayleigh(single, {0.1, 3}).regular);

  CHECK_THROWS_AS(check_rayleigh(T, {0.0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(check_rayleigh(T, {0.5, 0}), std::invalid_argument);
}

TEST_CASE("Rayleigh check: two close pairs with multiplicity two") {
  // lambda_lo = 1/12, pairs 2 cells apart, pairs half a period apart
  const int N = 240;
  SupportSet T{N, {10, 12, 130, 132}};
  const auto rep = check_rayleigh(T, {5.0 / 12, 2});
  CHECK(rep.regular);
  CHECK(rep.window_condition);
  REQUIRE(rep.partition);
  CHECK((*rep.partition)[0] == std::vector<int>{10, 130});
  CHECK((*rep.partition)[1] == std::vector<int>{12, 132});

  const auto one = check_rayleigh(T, {5.0 / 12, 1});
  CHECK_FALSE(one.regular);
  REQUIRE(one.window_violation);
  CHECK(one.window_violation->members.size() >= 2);
}

TEST_CASE("Rayleigh check: a separation of exactly d is admissible") {
  SupportSet T{100, {0, 25, 50, 75}};
  CHECK(check_rayleigh(T, {0.25, 1}).regular);
  CHECK_FALSE(check_rayleigh(T, {0.26, 1}).regular);
}

TEST_CASE("Rayleigh check agrees with a brute-force window count and is monotone") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> pick(0, 199);
  for (int trial = 0; trial < 300; ++trial) {
    SupportSet T{200, {}};
    const int n = 1 + trial % 7;
    while (int(T.indices.size()) < n) {
      const int m = pick(rng);
      if (std::find(T.indices.begin(), T.indices.end(), m) == T.indices.end()) T.indices.push_back(m);
    }
    std::sort(T.indices.begin(), T.indices.end());
    const double d = 0.02 + 0.3 * (trial % 11) / 10.0;
    const int r = 1 + trial % 3;
    const auto rep = check_rayleigh(T, {d, r});
    CHECK(rep.window_condition == brute_window_ok(T.positions(), d, r));
    if (rep.regular) {
      CHECK(rep.window_condition);
      CHECK(check_rayleigh(T, {d * 0.7, r}).regular);
      for (const auto& part : *rep.partition) {
        std::vector<double> pos;
        for (int m : part) pos.push_back(double(m) / 200);
        CHECK(min_separation(pos) >= d - 1e-12);
      }
    }
  }
}

TEST_CASE("signal generation") {
  SignalRequest rq;
  rq.seed = 3;
  rq.N = 92;
  rq.flo = 11;
  rq.r = 1;
  rq.spikes = 3;
  rq.kappa_mult = 2.0;
  const auto g = generate_signal(rq);
  CHECK(g.support.size() == 3);
  CHECK(check_rayleigh(g.support, {2.0 / 11, 1}).regular);
  CHECK(g.signal.values.minCoeff() >= 0.0);
  for (int m : g.support.indices) {
    CHECK(g.signal.values(m) >= 0.5);
    CHECK(g.signal.values(m) <= 2.0);
  }

  const auto again = generate_signal(rq);
  CHECK(again.support.indices == g.support.indices);
  CHECK(again.signal.values == g.signal.values);

  rq.spikes = 0;
  const auto empty = generate_signal(rq);
  CHECK(empty.support.size() == 0);
  CHECK(empty.signal.values.isZero(0.0));

  rq.spikes = 50;
  CHECK_THROWS_AS(generate_signal(rq), GeometryError);
}

TEST_CASE("generated supports always satisfy their declared geometry") {
  int pass = 0;
  const int draws = 1000;
  for (int s = 0; s < draws; ++s) {
    SignalRequest rq;
    rq.seed = 1000 + s;
    rq.N = 2048;
    rq.flo = 64;
    rq.r = 2;
    rq.spikes = 1 + s % 8;
    rq.min_sep_hi = 2.0 / 2048;
    const auto g = generate_signal(rq);
    const bool ok = check_rayleigh(g.support, {1.87 * 2 / 64, 2}).regular &&
                    min_separation(g.support.positions()) >= rq.min_sep_hi - 1e-12 &&
                    int(g.support.size()) == rq.spikes;
    pass += ok;
  }
  CHECK(pass == draws);
}

TEST_CASE("noise injection") {
  std::mt19937_64 rng(13);
  const auto y = random_vector(256, rng);
  const auto z0 = add_noise(y, NoiseModel::l1_budget, 0.0, 1);
  CHECK(z0.y == y);
  CHECK(z0.z_l1 == 0.0);

  const auto z1 = add_noise(y, NoiseModel::l1_budget, 0.5, 2);
  CHECK(std::abs(z1.z.lpNorm<1>() - 0.5) < 1e-12);
  CHECK(std::abs(z1.z_l1 - 0.5) < 1e-12);
  CHECK(((z1.y - y) - z1.z).cwiseAbs().maxCoeff() <= 1e-15 * (1 + y.cwiseAbs().maxCoeff()));

  const auto g1 = add_noise(y, NoiseModel::gaussian, 0.01, 99);
  const auto g2 = add_noise(y, NoiseModel::gaussian, 0.01, 99);
  CHECK(g1.z_l1 == g2.z_l1);
  CHECK(g1.z == g2.z);

  CHECK_THROWS_AS(add_noise(y, NoiseModel::gaussian, -1.0, 1), std::invalid_argument);
  CHECK(parse_noise_model("l1_budget") == NoiseModel::l1_budget);
  CHECK(parse_noise_model(to_string(NoiseModel::gaussian)) == NoiseModel::gaussian);
  CHECK_THROWS(parse_noise_model("laplace"));
}

TEST_CASE("resolution factors") {
  CHECK(srf(10, 1.0 / 100, 1000) == doctest::Approx(10.0));
  CHECK(dsrf(1000, 10) == doctest::Approx(50.0));
  CHECK(srf(16, 1.0 / 64, 64) == doctest::Approx(4.0));
  CHECK_THROWS_AS(srf(10, 0.1, 1000), std::invalid_argument);
  CHECK_THROWS_AS(srf(10, 1.0 / 2000, 1000), std::invalid_argument);
}
