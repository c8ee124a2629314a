#pragma once

#include "srfine/signal_model.hpp"
#include "srfine/trig_core.hpp"

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace srfine {

struct IllConditionedSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Block system [[D0, D1], [D1, D2]] [alpha; beta] = [f; d] with
// [D_l]_{ij} = K^{(l)}(v_i - v_j) for the Fejer^4 kernel K of cutoff fc.
struct InterpolationSystem {
  std::vector<double> V;
  int fc = 0;
  Eigen::MatrixXd D0, D1, D2;
  Eigen::VectorXd alpha, beta;
  double condition = 0.0;
  double residual = 0.0;
};

InterpolationSystem assemble_system(const std::vector<double>& V, int fc);

struct Interpolant {
  TrigPolyd poly;
  InterpolationSystem system;
  bool admissible = true;  // V in R(kappa/fc, 1) and fc >= 128
  std::vector<std::string> warnings;
};

// q(t) = sum_j alpha_j K(t - v_j) + beta_j K'(t - v_j) with q(v_j) = f_j, q'(v_j) = d_j.
// Requires |f_j| <= 1 and |d_j| <= fc; throws IllConditionedSystem above condition 1e12.
Interpolant solve_interpolant(const std::vector<double>& V, const Eigen::VectorXd& f, const Eigen::VectorXd& d, int fc);
TrigPolyd build_interpolant(const std::vector<double>& V, const Eigen::VectorXd& f, const Eigen::VectorXd& d, int fc);

struct NormEntry {
  std::string name;
  double measured;
  double bound;
  bool pass() const { return measured <= bound; }
};

struct MatrixNormReport {
  std::vector<NormEntry> entries;  // D1 scaled, D0 inverse, E inverse scaled, F inverse, D2 inverse scaled
  bool all_pass() const;
};

MatrixNormReport matrix_norm_report(const InterpolationSystem& sys, double bound_scale = 1.0);

// 0.5 (q + 1) with q interpolating -1 with zero slope on V; constant 1 for empty V.
TrigPolyd build_zero_interpolant(const std::vector<double>& V, int fc);

struct CertificateParams {
  SupportSet T;
  int r = 1;
  int flo = 0;
  double lhi = 0.0;
};

// Per-factor cutoff: floor(flo/r), lowered to even.
int factor_cutoff(int flo, int r);

// Checks T in R(kappa r lambda_lo, r) with round-robin partition and 2 lhi separation.
struct PreconditionReport {
  bool ok = false;
  std::string detail;
  std::vector<std::vector<int>> partition;
};
PreconditionReport check_certificate_preconditions(const CertificateParams& p);

struct ScaledFactor {
  TrigPolyd zero_product;  // product of zero interpolants over the other subsets
  TrigPolyd compensator;   // interpolant on the own subset, scale restored
  double scale = 1.0;      // divisor applied so constraints met |f| <= 1, |d| <= fc
};

struct CertificatePack {
  CertificateParams params;
  bool precondition_ok = false;
  std::string precondition_detail;
  int factor_fc = 0;
  std::vector<std::vector<int>> partition;
  double rho = 0.0;
  double gamma = 0.0;
  std::vector<int> s;
  std::vector<int> s_prime;
  std::vector<TrigPolyd> zero_factors;
  std::vector<ScaledFactor> q1_terms, q2_terms;
  TrigPolyd q0, q1, q2;
};

TrigPolyd build_q0(const SupportSet& T, int r, int flo, double lhi);
TrigPolyd build_q1(const SupportSet& T, int r, int flo, double lhi, const std::vector<int>& s);
TrigPolyd build_q2(const SupportSet& T, int r, int flo, double lhi, const std::vector<int>& s_prime);

// Builds all three; on a failed precondition returns with precondition_ok = false.
CertificatePack build_certificate_pack(const CertificateParams& p, const std::vector<int>& s,
                                       const std::vector<int>& s_prime);

struct CertificateTolerances {
  int oversample = 16;
  double confinement_slack = 1e-9;
  double q0_node = 1e-7;
  double q1_node_rel = 1e-7;  // relative to rho
  double q2_value_rel = 1e-6; // relative to rho
  double q2_slope_rel = 1e-6; // relative to gamma
  double bernstein_slack = 1e-6;
  double fit_headroom = 2.0;
  int window_samples = 600;
  bool force_fitted = false;
};

struct PropertyCheck {
  std::string name;
  std::string constants;  // "paper", "fitted" or "exact"
  bool passed = false;
  double worst_margin = 0.0;
  double fitted_constant = 0.0;  // fitted runs only
  std::string detail;
};

struct PropertyReport {
  bool precondition_ok = false;
  std::string precondition_detail;
  bool paper_regime = false;  // flo >= 128 r
  std::vector<PropertyCheck> checks;
  bool all_pass() const;
  const PropertyCheck* find(const std::string& name) const;
};

PropertyReport verify_certificate(const CertificatePack& pack, const CertificateTolerances& tol = {});

// Human-readable margin table.
std::string format_margin_table(const PropertyReport& rep);

}  // namespace srfine
