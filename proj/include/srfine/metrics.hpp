#pragma once

#include "srfine/signal_model.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace srfine {

// Width parameter of the error kernel: fhi = round(1/lhi).
int high_cutoff(double lhi);

// Samples k(n/N), n = 0..N-1, of the Fejer error kernel with fhi = round(1/lhi).
Eigen::VectorXd fejer_samples(double lhi, int N);

// ||k * (xhat - x)||_1 with circular convolution on the N-grid.
double fejer_error(const Eigen::VectorXd& xhat, const Eigen::VectorXd& x, double lhi, int N);
// Same quantity for a precomputed difference h.
double fejer_l1(const Eigen::VectorXd& h, double lhi, int N);

// {m : h_m < 0} as a support set.
SupportSet negative_support(const Eigen::VectorXd& h);

struct SignPatterns {
  std::vector<int> s;        // sign of the mass near each t_j
  std::vector<int> s_prime;  // sign of the first moment near each t_j
};

// Closed neighbourhoods |m/N - t_j| <= lhi; a grid point at distance exactly lhi
// from two support points belongs to the lower-indexed one only.
// Throws GeometryError when T is not 2 lhi separated; sign(0) = +1.
SignPatterns sign_patterns(const Eigen::VectorXd& h, const SupportSet& T, double lhi);

struct ErrorBreakdown {
  double total = 0.0;
  double A0 = 0.0, A1 = 0.0, A2 = 0.0, A3 = 0.0;
  double rhs = 0.0;  // A0 + A1 + cabshid A2 + cabshidd A3
  double bound_paper = 0.0;
  double bound_empirical_constant = 0.0;
  bool inequality_holds(double slack = 1e-9) const { return total <= rhs + slack; }
};

// Throws InvariantViolation if total exceeds the right-hand side by more than 1e-9.
ErrorBreakdown error_decomposition(const Eigen::VectorXd& h, const SupportSet& T, double lhi, int N);

// r^{2r+4} c^{r+1} srf^{2r} z_l1.
double theorem_bound(int r, double srf, double z_l1, double c);
// Same with the composed constant; requires srf > 12.
double theorem_bound_paper(int r, double srf, double z_l1);

// Fills bound_paper and bound_empirical_constant = total / (srf^{2r} z_l1).
void attach_bounds(ErrorBreakdown& b, int r, double srf, double z_l1);

struct FejerSumReport {
  int N = 0;
  double lhi = 0.0;
  int fhi = 0;
  double normalization = 0.0;  // sum_n k(n/N)
  double normalization_expected = 1.0;  // 1 below fhi = N; the k = +-N aliases add 2(1 - N/(fhi+1)) beyond
  double d1_sum = 0.0;         // sum_n |k'(n/N)|
  double d1_bound = 0.0;       // cabshid / lhi
  double d2_sum = 0.0;         // (1/2) sum_n of the 8-point sup proxy of |k''| over n/N +- lhi
  double d2_bound = 0.0;       // cabshidd / lhi^2
  double d2_analytic = 0.0;    // (1/2) N * 4 pi^2 fhi^3 / N, certified but loose
  bool d1_pass = false;
  bool d2_pass = false;
  bool normalization_pass() const { return std::abs(normalization - normalization_expected) <= 1e-12; }
};

FejerSumReport verify_fejer_sum_bounds(int N, double lhi);

struct MetricsRow {
  std::uint64_t seed = 0;
  int N = 0, flo = 0, r = 1;
  double lhi = 0.0, srf = 0.0, z_l1 = 0.0;
  ErrorBreakdown breakdown;
};

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRow& row);

}  // namespace srfine
