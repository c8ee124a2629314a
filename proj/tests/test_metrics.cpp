#include "srfine/constants.hpp"
#include "srfine/metrics.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace srfine;
using srfine::testing::pi;

namespace {

// Kernel sample from its cosine series, normalized so the N samples sum to one.
double kernel_direct(int fhi, int N, double t) {
  double acc = 1.0;
  for (int k = 1; k <= fhi; ++k) acc += 2.0 * (1.0 - double(k) / (fhi + 1)) * std::cos(2 * pi * k * t);
  return acc / N;
}

double error_direct(const Eigen::VectorXd& h, double lhi) {
  const int N = int(h.size());
  const int fhi = int(std::lround(1.0 / lhi));
  double total = 0.0;
  for (int n = 0; n < N; ++n) {
    double acc = 0.0;
    for (int m = 0; m < N; ++m) acc += kernel_direct(fhi, N, double(n - m) / N) * h(m);
    total += std::abs(acc);
  }
  return total;
}

// Random h with h < 0 exactly on a 2 lhi separated set T.
struct RandomDifference {
  Eigen::VectorXd h;
  SupportSet T;
};

RandomDifference random_difference(int N, int cells, int count, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, N - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RandomDifference out;
  out.T.N = N;
  std::vector<int> chosen;
  for (int tries = 0; tries < 1000 && int(chosen.size()) < count; ++tries) {
    const int c = pick(rng);
    bool ok = true;
    for (int o : chosen) {
      const int d = std::abs(c - o);
      if (std::min(d, N - d) < 2 * cells) ok = false;
    }
    if (ok) chosen.push_back(c);
  }
  std::sort(chosen.begin(), chosen.end());
  out.T.indices = chosen;
  out.h = Eigen::VectorXd::Zero(N);
  for (int m = 0; m < N; ++m) out.h(m) = u(rng) < 0.5 ? 0.0 : u(rng);
  for (int c : chosen) out.h(c) = -0.1 - u(rng);
  return out;
}

}  // namespace

TEST_CASE("high cutoff") {
  CHECK(high_cutoff(1.0 / 8) == 8);
  CHECK(high_cutoff(1.0 / 128) == 128);
  CHECK(high_cutoff(16.0 / 256) == 16);
}

TEST_CASE("kernel samples match the cosine series") {
  for (auto [N, lhi] : std::vector<std::pair<int, double>>{{64, 1.0 / 8}, {256, 1.0 / 16}, {64, 1.0 / 64}}) {
    const auto k = fejer_samples(lhi, N);
    const int fhi = high_cutoff(lhi);
    for (int n = 0; n < N; ++n) CHECK(k(n) == doctest::Approx(kernel_direct(fhi, N, double(n) / N)).epsilon(1e-12));
    CHECK(k.minCoeff() >= 0.0);
  }
}

TEST_CASE("error metric basics") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int N = 128;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(N), xh = Eigen::VectorXd::Zero(N);
  for (int m = 0; m < N; m += 17) x(m) = 0.5 + u(rng);
  for (int m = 3; m < N; m += 13) xh(m) = u(rng);
  const double lhi = 1.0 / 32;
  CHECK(fejer_error(x, x, lhi, N) == 0.0);
  const double e = fejer_error(xh, x, lhi, N);
  CHECK(e == fejer_error(x, xh, lhi, N));
  CHECK(e <= (xh - x).lpNorm<1>() + 1e-9);
  CHECK(e == doctest::Approx(error_direct(xh - x, lhi)).epsilon(1e-10));
  CHECK_THROWS_AS(fejer_error(x, x, 0.5 / N, N), std::invalid_argument);
  CHECK_THROWS_AS(fejer_error(x, Eigen::VectorXd::Zero(N - 1), lhi, N), std::invalid_argument);
}

TEST_CASE("one-cell shift is a small error") {
  const int N = 256;
  const double lhi = 16.0 / N;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(N), xh = Eigen::VectorXd::Zero(N);
  x(100) = 1.0;
  xh(101) = 1.0;
  const double e = fejer_error(xh, x, lhi, N);
  CHECK(e == doctest::Approx(error_direct(xh - x, lhi)).epsilon(1e-10));
  CHECK(e <= 0.2);
}

TEST_CASE("far displacement costs about twice the mass") {
  const int N = 1024;
  const double lhi = 4.0 / N;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(N), xh = Eigen::VectorXd::Zero(N);
  for (int m : {100, 400, 700}) {
    x(m) = 1.0 + m / 1000.0;
    xh(m + 60) = x(m);
  }
  const double e = fejer_error(xh, x, lhi, N);
  CHECK(e >= 0.95 * 2 * x.lpNorm<1>());
  CHECK(e <= 2 * x.lpNorm<1>() + 1e-12);
}

TEST_CASE("sign patterns") {
  SUBCASE("single negative cluster") {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(64);
    h(20) = -0.5;
    h(21) = 0.2;
    SupportSet T{64, {20}};
    const auto sp = sign_patterns(h, T, 2.0 / 64);
    CHECK(sp.s == std::vector<int>{-1});
    CHECK(sp.s_prime == std::vector<int>{1});  // moment +0.2/64
  }
  SUBCASE("symmetric neighbourhood gives the +1 convention") {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(64);
    h(30) = -1.0;
    h(29) = 0.25;
    h(31) = 0.25;
    SupportSet T{64, {30}};
    const auto sp = sign_patterns(h, T, 2.0 / 64);
    CHECK(sp.s == std::vector<int>{-1});
    CHECK(sp.s_prime == std::vector<int>{1});
  }
  SUBCASE("mass is summed over the closed neighbourhood") {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(64);
    h(10) = -0.3;
    h(12) = 0.4;  // exactly lhi away: inside
    SupportSet T{64, {10}};
    CHECK(sign_patterns(h, T, 2.0 / 64).s == std::vector<int>{1});
    CHECK(sign_patterns(h, T, 1.0 / 64).s == std::vector<int>{-1});
  }
  SUBCASE("guards") {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(64);
    h(10) = -1;
    h(13) = -1;
    CHECK_THROWS_AS(sign_patterns(h, SupportSet{64, {10, 13}}, 2.0 / 64), GeometryError);
    CHECK_THROWS_AS(sign_patterns(h, SupportSet{64, {10}}, 1.0 / 64), std::invalid_argument);
  }
  SUBCASE("brute-force agreement") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
      const int N = 240, cells = 1 + trial % 5;
      const double lhi = double(cells) / N;
      auto rd = random_difference(N, cells, 4, rng);
      const auto sp = sign_patterns(rd.h, rd.T, lhi);
      std::vector<bool> taken(N, false);
      for (std::size_t j = 0; j < rd.T.size(); ++j) {
        double mass = 0.0, moment = 0.0;
        for (int m = 0; m < N; ++m) {
          const double tj = rd.T.position(j);
          if (taken[m] || wrap_distance(double(m) / N, tj) > lhi + 1e-12) continue;
          taken[m] = true;
          mass += rd.h(m);
          double off = double(m) / N - tj;
          off -= std::round(off);
          moment += off * rd.h(m);
        }
        CHECK(sp.s[j] == (mass >= 0 ? 1 : -1));
        CHECK(sp.s_prime[j] == (moment >= 0 ? 1 : -1));
      }
    }
  }
}

TEST_CASE("error decomposition") {
  SUBCASE("zero difference") {
    const auto b = error_decomposition(Eigen::VectorXd::Zero(64), SupportSet{64, {}}, 2.0 / 64, 64);
    CHECK(b.total == 0.0);
    CHECK(b.A0 == 0.0);
    CHECK(b.A1 + b.A2 + b.A3 == 0.0);
  }
  SUBCASE("nonnegative difference") {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(64);
    h(3) = 0.5;
    h(40) = 1.5;
    const auto b = error_decomposition(h, SupportSet{64, {}}, 2.0 / 64, 64);
    CHECK(b.A1 + b.A2 + b.A3 == 0.0);
    CHECK(b.A0 == doctest::Approx(2.0));
    // a nonnegative h keeps its mass under a nonnegative kernel
    CHECK(b.total == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("random instances") {
    std::mt19937_64 rng(12);
    double worst = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 1000; ++trial) {
      const int N = 256, cells = 2 + trial % 7;  // fhi < N keeps the sampled kernel at unit mass
      auto rd = random_difference(N, cells, 1 + trial % 6, rng);
      const auto b = error_decomposition(rd.h, rd.T, double(cells) / N, N);
      CHECK(b.A0 >= 0.0);
      CHECK(b.total <= b.rhs + 1e-9);
      worst = std::min(worst, b.rhs - b.total);
    }
    MESSAGE("smallest decomposition slack: " << worst);
  }
}

TEST_CASE("decomposition at the one-cell width") {
  // fhi = N aliases the k = +-N coefficients onto zero frequency, so the kernel
  // samples carry mass 1 + 2/(N+1) and a nonnegative h exceeds its far-field term.
  const int N = 64;
  Eigen::VectorXd h = Eigen::VectorXd::Zero(N);
  h(5) = 1.0;
  const double total = fejer_l1(h, 1.0 / N, N);
  CHECK(total == doctest::Approx(1.0 + 2.0 / (N + 1)).epsilon(1e-12));
  CHECK_THROWS_AS(error_decomposition(h, SupportSet{N, {}}, 1.0 / N, N), InvariantViolation);
}

TEST_CASE("theorem bound arithmetic") {
  CHECK(theorem_bound(1, 16, 0.0, 1.0) == 0.0);
  CHECK(theorem_bound(1, 16, 0.1, 1.0) == doctest::Approx(25.6));
  CHECK(theorem_bound(2, 10, 1.0, 2.0) == doctest::Approx(std::pow(2.0, 8) * 8 * 1e4));
  const double paper = theorem_bound_paper(1, 16, 0.1);
  CHECK(paper == doctest::Approx(theorem_bound(1, 16, 0.1, constants::stability_constant())));
  CHECK(paper > 1e6 * 25.6);
  CHECK_THROWS_AS(theorem_bound_paper(1, 12, 0.1), std::invalid_argument);

  ErrorBreakdown b;
  b.total = 0.5;
  attach_bounds(b, 1, 16, 0.1);
  CHECK(b.bound_empirical_constant == doctest::Approx(0.5 / 25.6));
  CHECK(std::isfinite(b.bound_paper));
  attach_bounds(b, 1, 8, 0.1);
  CHECK(std::isnan(b.bound_paper));
}

TEST_CASE("derivative sum bounds") {
  for (auto [N, lhi] : std::vector<std::pair<int, double>>{
           {64, 1.0 / 8}, {256, 1.0 / 16}, {2048, 1.0 / 128}, {256, 16.0 / 256}, {64, 1.0 / 64}}) {
    const auto r = verify_fejer_sum_bounds(N, lhi);
    CAPTURE(N);
    CAPTURE(lhi);
    CHECK(r.d1_pass);
    CHECK(r.d2_pass);
    CHECK(r.d1_bound == doctest::Approx(constants::cabshid / lhi));
    CHECK(r.d2_bound == doctest::Approx(constants::cabshidd / (lhi * lhi)));
    CHECK(r.normalization_pass());
    if (r.fhi < N) CHECK(r.normalization_expected == 1.0);
  }
  // first-derivative sum against a finite-difference oracle
  const int N = 256, fhi = 16;
  double fd = 0.0;
  const double step = 1e-6;
  for (int n = 0; n < N; ++n)
    fd += std::abs(kernel_direct(fhi, N, double(n) / N + step) - kernel_direct(fhi, N, double(n) / N - step)) / (2 * step);
  CHECK(verify_fejer_sum_bounds(N, 1.0 / fhi).d1_sum == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("metrics CSV row") {
  MetricsRow row;
  row.seed = 7;
  row.N = 64;
  row.flo = 8;
  row.lhi = 1.0 / 64;
  row.srf = 8;
  row.z_l1 = 0.1;
  const auto header = metrics_csv_header();
  const auto line = metrics_csv_row(row);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(line.begin(), line.end(), ','));
  CHECK(header.rfind("seed,N,flo,lhi,r,srf,z_l1,total", 0) == 0);
}
