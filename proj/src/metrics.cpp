#include "srfine/metrics.hpp"

#include "srfine/constants.hpp"
#include "srfine/trig_core.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <iomanip>
#include <sstream>

namespace srfine {

namespace {

constexpr double pi = std::numbers::pi;

int sgn(double v) { return v < 0.0 ? -1 : 1; }

void check_width(double lhi, int N) {
  if (N < 2) throw std::invalid_argument("fejer error: N must be at least 2");
  if (!(lhi * N >= 1.0 - 1e-9)) throw std::invalid_argument("fejer error: lhi must be at least 1/N");
  if (!(lhi < 1.0)) throw std::invalid_argument("fejer error: lhi must be below 1");
}

// Grid-index owner of each near-set; -1 for the far set.
std::vector<int> near_owner(const SupportSet& T, double lhi) {
  const int N = T.N;
  std::vector<int> owner(N, -1);
  const int reach = int(std::floor(lhi * N + 1e-9));
  for (std::size_t j = 0; j < T.size(); ++j)
    for (int o = -reach; o <= reach; ++o) {
      const int m = ((T.indices[j] + o) % N + N) % N;
      if (owner[m] < 0) owner[m] = int(j);
    }
  return owner;
}

void check_geometry(const Eigen::VectorXd& h, const SupportSet& T, double lhi) {
  if (h.size() != T.N) throw std::invalid_argument("sign patterns: h and T disagree on N");
  const auto neg = negative_support(h);
  if (neg.indices != T.indices) throw std::invalid_argument("sign patterns: T must equal {m : h_m < 0}");
  if (min_separation(T.positions()) < 2.0 * lhi - 1e-12)
    throw GeometryError("sign patterns: support points closer than 2 lhi, neighbourhoods overlap");
}

// k'(t) and k''(t) from the cosine series of the Fejer kernel.
struct Derivs {
  double d1, d2;
};

Derivs fejer_derivs(int fhi, int N, double t) {
  const std::complex<double> step = std::polar(1.0, 2 * pi * t);
  std::complex<double> z = step;
  double s1 = 0.0, s2 = 0.0;
  for (int k = 1; k <= fhi; ++k) {
    if (k % 64 == 0) z = std::polar(1.0, 2 * pi * k * t);
    const double w = 1.0 - double(k) / (fhi + 1);
    const double a = 2 * pi * k;
    s1 += w * a * z.imag();
    s2 += w * a * a * z.real();
    z *= step;
  }
  return {-2.0 * s1 / N, -2.0 * s2 / N};
}

}  // namespace

int high_cutoff(double lhi) {
  if (!(lhi > 0.0)) throw std::invalid_argument("lhi must be positive");
  const int f = int(std::lround(1.0 / lhi));
  if (f < 1) throw std::invalid_argument("lhi must be at most 1");
  return f;
}

Eigen::VectorXd fejer_samples(double lhi, int N) {
  check_width(lhi, N);
  const int fhi = high_cutoff(lhi);
  Eigen::VectorXd k(N);
  for (int n = 0; n < N; ++n) k(n) = fejer_value(fhi, N, double(n) / N);
  return k;
}

double fejer_l1(const Eigen::VectorXd& h, double lhi, int N) {
  if (h.size() != N) throw std::invalid_argument("fejer_error: length mismatch");
  const Eigen::VectorXd k = fejer_samples(lhi, N);
  if (h.isZero(0.0)) return 0.0;
  Eigen::FFT<double> fft;
  std::vector<double> hv(h.data(), h.data() + N), kv(k.data(), k.data() + N), out;
  std::vector<std::complex<double>> H, K;
  fft.fwd(H, hv);
  fft.fwd(K, kv);
  for (std::size_t i = 0; i < H.size(); ++i) H[i] *= K[i];
  fft.inv(out, H);
  double sum = 0.0;
  for (double v : out) sum += std::abs(v);
  return sum;
}

double fejer_error(const Eigen::VectorXd& xhat, const Eigen::VectorXd& x, double lhi, int N) {
  if (xhat.size() != N || x.size() != N) throw std::invalid_argument("fejer_error: length mismatch");
  return fejer_l1(xhat - x, lhi, N);
}

SupportSet negative_support(const Eigen::VectorXd& h) {
  SupportSet T;
  T.N = int(h.size());
  for (int m = 0; m < T.N; ++m)
    if (h(m) < 0.0) T.indices.push_back(m);
  return T;
}

SignPatterns sign_patterns(const Eigen::VectorXd& h, const SupportSet& T, double lhi) {
  check_geometry(h, T, lhi);
  const auto owner = near_owner(T, lhi);
  std::vector<double> mass(T.size(), 0.0), moment(T.size(), 0.0);
  for (int m = 0; m < T.N; ++m) {
    const int j = owner[m];
    if (j < 0) continue;
    mass[j] += h(m);
    moment[j] += wrap_difference(double(m) / T.N, T.position(j)) * h(m);
  }
  SignPatterns sp;
  for (std::size_t j = 0; j < T.size(); ++j) {
    sp.s.push_back(sgn(mass[j]));
    sp.s_prime.push_back(sgn(moment[j]));
  }
  return sp;
}

ErrorBreakdown error_decomposition(const Eigen::VectorXd& h, const SupportSet& T, double lhi, int N) {
  if (T.N != N) throw std::invalid_argument("error_decomposition: T and N disagree");
  check_geometry(h, T, lhi);
  const auto owner = near_owner(T, lhi);
  ErrorBreakdown b;
  std::vector<double> mass(T.size(), 0.0), moment(T.size(), 0.0), second(T.size(), 0.0);
  for (int m = 0; m < N; ++m) {
    const int j = owner[m];
    if (j < 0) {
      b.A0 += h(m);
      continue;
    }
    const double off = wrap_difference(T.position(j), double(m) / N);
    mass[j] += h(m);
    moment[j] += off * h(m);
    second[j] += off * off * std::abs(h(m));
  }
  for (std::size_t j = 0; j < T.size(); ++j) {
    b.A1 += std::abs(mass[j]);
    b.A2 += std::abs(moment[j]);
    b.A3 += second[j];
  }
  b.A2 /= lhi;
  b.A3 /= lhi * lhi;
  b.total = fejer_l1(h, lhi, N);
  b.rhs = b.A0 + b.A1 + constants::cabshid * b.A2 + constants::cabshidd * b.A3;
  if (!b.inequality_holds()) {
    std::ostringstream os;
    os << std::setprecision(17) << "error decomposition violated: total " << b.total << " > " << b.rhs;
    throw InvariantViolation(os.str());
  }
  return b;
}

double theorem_bound(int r, double srf, double z_l1, double c) {
  if (r < 1) throw std::invalid_argument("theorem_bound: r must be at least 1");
  return std::pow(double(r), 2 * r + 4) * std::pow(c, r + 1) * std::pow(srf, 2 * r) * z_l1;
}

double theorem_bound_paper(int r, double srf, double z_l1) {
  if (!(srf > 12.0)) throw std::invalid_argument("theorem_bound: the composed constant needs SRF > 12");
  return theorem_bound(r, srf, z_l1, constants::stability_constant());
}

void attach_bounds(ErrorBreakdown& b, int r, double srf, double z_l1) {
  b.bound_paper = srf > 12.0 ? theorem_bound_paper(r, srf, z_l1) : std::nan("");
  b.bound_empirical_constant = z_l1 > 0.0 ? b.total / (std::pow(srf, 2 * r) * z_l1) : std::nan("");
}

FejerSumReport verify_fejer_sum_bounds(int N, double lhi) {
  check_width(lhi, N);
  FejerSumReport rep;
  rep.N = N;
  rep.lhi = lhi;
  rep.fhi = high_cutoff(lhi);
  const int fhi = rep.fhi;
  if (fhi >= N) rep.normalization_expected = 1.0 + 2.0 * (1.0 - double(N) / (fhi + 1));
  constexpr int sub = 8;
  for (int n = 0; n < N; ++n) {
    const double t = double(n) / N;
    rep.normalization += fejer_value(fhi, N, t);
    rep.d1_sum += std::abs(fejer_derivs(fhi, N, t).d1);
    double sup = 0.0;
    for (int i = 0; i < sub; ++i) {
      const double u = t - lhi + 2.0 * lhi * i / (sub - 1);
      sup = std::max(sup, std::abs(fejer_derivs(fhi, N, u).d2));
    }
    rep.d2_sum += 0.5 * sup;
  }
  rep.d1_bound = constants::cabshid / lhi;
  rep.d2_bound = constants::cabshidd / (lhi * lhi);
  rep.d2_analytic = 0.5 * 4 * pi * pi * std::pow(double(fhi), 3);
  rep.d1_pass = rep.d1_sum <= rep.d1_bound;
  rep.d2_pass = rep.d2_sum <= rep.d2_bound;
  return rep;
}

std::string metrics_csv_header() {
  return "seed,N,flo,lhi,r,srf,z_l1,total,A0,A1,A2,A3,bound_paper,empirical_constant";
}

std::string metrics_csv_row(const MetricsRow& row) {
  std::ostringstream os;
  os << std::setprecision(17) << row.seed << ',' << row.N << ',' << row.flo << ',' << row.lhi << ',' << row.r << ','
     << row.srf << ',' << row.z_l1 << ',' << row.breakdown.total << ',' << row.breakdown.A0 << ',' << row.breakdown.A1
     << ',' << row.breakdown.A2 << ',' << row.breakdown.A3 << ',' << row.breakdown.bound_paper << ','
     << row.breakdown.bound_empirical_constant;
  return os.str();
}

}  // namespace srfine
