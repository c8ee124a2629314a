#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace srfine {

struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Real-valued trigonometric polynomial p(t) = sum_{|k|<=fc} c_k exp(-i 2 pi k t).
// Coefficients are stored symmetrically: index k + fc holds c_k.
template <typename Scalar = double>
class TrigPoly {
 public:
  using Complex = std::complex<Scalar>;
  using Coeffs = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  TrigPoly() : fc_(0), c_(Coeffs::Zero(1)) {}

  // Validates length and Hermitian symmetry, then stores the exactly
  // symmetrized coefficients.
  TrigPoly(int fc, const Coeffs& c) : fc_(fc), c_(c) {
    if (fc < 0) throw std::invalid_argument("TrigPoly: negative cutoff");
    if (c.size() != 2 * fc + 1) throw std::invalid_argument("TrigPoly: coefficient length must be 2fc+1");
    const Scalar scale = Scalar(1) + c.cwiseAbs().maxCoeff();
    for (int k = 0; k <= fc; ++k) {
      if (std::abs(c(fc + k) - std::conj(c(fc - k))) > Scalar(1e-12) * scale)
        throw InvariantViolation("TrigPoly: coefficients are not Hermitian at k=" + std::to_string(k));
    }
    symmetrize();
  }

  // Skips the Hermitian check; used to build deliberately invalid inputs.
  static TrigPoly unchecked(int fc, const Coeffs& c) {
    TrigPoly p;
    p.fc_ = fc;
    p.c_ = c;
    return p;
  }

  static TrigPoly constant(Scalar v) {
    Coeffs c(1);
    c(0) = Complex(v, 0);
    return TrigPoly(0, c);
  }

  static TrigPoly zero(int fc = 0) { return TrigPoly(fc, Coeffs::Zero(2 * fc + 1)); }

  int cutoff() const { return fc_; }
  const Coeffs& coeffs() const { return c_; }
  Complex coeff(int k) const { return std::abs(k) > fc_ ? Complex(0) : c_(k + fc_); }

  // Largest |k| with a coefficient above tol (structural frequency check).
  int effective_cutoff(Scalar tol = Scalar(0)) const {
    for (int k = fc_; k > 0; --k)
      if (std::abs(c_(fc_ + k)) > tol) return k;
    return 0;
  }

  Scalar l1_coeff_norm() const { return c_.cwiseAbs().sum(); }

 private:
  void symmetrize() {
    c_(fc_) = Complex(c_(fc_).real(), 0);
    for (int k = 1; k <= fc_; ++k) {
      const Complex avg = Scalar(0.5) * (c_(fc_ + k) + std::conj(c_(fc_ - k)));
      c_(fc_ + k) = avg;
      c_(fc_ - k) = std::conj(avg);
    }
  }

  int fc_;
  Coeffs c_;
};

using TrigPolyd = TrigPoly<double>;

template <typename Scalar>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// p(m/M) for m = 0..M-1 through one forward DFT of the wrapped coefficients.
template <typename Scalar>
RealVector<Scalar> eval_on_grid(const TrigPoly<Scalar>& p, int M) {
  const int fc = p.cutoff();
  if (M < 2 * fc + 1) throw std::invalid_argument("eval_on_grid: M < 2fc+1 would alias");
  using Complex = std::complex<Scalar>;
  std::vector<Complex> buf(M, Complex(0)), out(M);
  for (int k = -fc; k <= fc; ++k) buf[((k % M) + M) % M] += p.coeff(k);
  Eigen::FFT<Scalar> fft;
  fft.fwd(out, buf);
  RealVector<Scalar> v(M);
  for (int m = 0; m < M; ++m) v(m) = out[m].real();
  return v;
}

// Direct summation; unit phase is advanced by multiplication and resynchronised
// every 64 steps to bound drift.
template <typename Scalar>
std::complex<Scalar> eval_complex(const TrigPoly<Scalar>& p, Scalar t) {
  using Complex = std::complex<Scalar>;
  const int fc = p.cutoff();
  const Scalar w = -2 * std::numbers::pi_v<Scalar> * t;
  const Complex step = std::polar(Scalar(1), w);
  Complex acc = p.coeff(0);
  Complex z(1);
  for (int k = 1; k <= fc; ++k) {
    z = (k % 64 == 0) ? std::polar(Scalar(1), w * k) : z * step;
    acc += p.coeff(k) * z + p.coeff(-k) * std::conj(z);
  }
  return acc;
}

template <typename Scalar>
Scalar eval_at(const TrigPoly<Scalar>& p, Scalar t) {
  const auto v = eval_complex(p, t);
  if (std::abs(v.imag()) > Scalar(1e-10) * (Scalar(1) + p.l1_coeff_norm()))
    throw InvariantViolation("eval_at: imaginary residue " + std::to_string(double(v.imag())));
  return v.real();
}

template <typename Scalar>
RealVector<Scalar> eval_at(const TrigPoly<Scalar>& p, const RealVector<Scalar>& ts) {
  RealVector<Scalar> v(ts.size());
  for (Eigen::Index i = 0; i < ts.size(); ++i) v(i) = eval_at(p, ts(i));
  return v;
}

template <typename Scalar>
TrigPoly<Scalar> multiply(const TrigPoly<Scalar>& p, const TrigPoly<Scalar>& q) {
  const int fp = p.cutoff(), fq = q.cutoff(), fc = fp + fq;
  typename TrigPoly<Scalar>::Coeffs c = TrigPoly<Scalar>::Coeffs::Zero(2 * fc + 1);
  for (int a = -fp; a <= fp; ++a) {
    const auto pa = p.coeff(a);
    for (int b = -fq; b <= fq; ++b) c(a + b + fc) += pa * q.coeff(b);
  }
  return TrigPoly<Scalar>(fc, c);
}

template <typename Scalar>
TrigPoly<Scalar> derivative(const TrigPoly<Scalar>& p) {
  using Complex = std::complex<Scalar>;
  const int fc = p.cutoff();
  typename TrigPoly<Scalar>::Coeffs c(2 * fc + 1);
  for (int k = -fc; k <= fc; ++k)
    c(k + fc) = Complex(0, -2 * std::numbers::pi_v<Scalar> * k) * p.coeff(k);
  return TrigPoly<Scalar>(fc, c);
}

template <typename Scalar>
TrigPoly<Scalar> add(const TrigPoly<Scalar>& p, const TrigPoly<Scalar>& q) {
  const int fc = std::max(p.cutoff(), q.cutoff());
  typename TrigPoly<Scalar>::Coeffs c(2 * fc + 1);
  for (int k = -fc; k <= fc; ++k) c(k + fc) = p.coeff(k) + q.coeff(k);
  return TrigPoly<Scalar>(fc, c);
}

template <typename Scalar>
TrigPoly<Scalar> scale(const TrigPoly<Scalar>& p, Scalar s) {
  return TrigPoly<Scalar>(p.cutoff(), p.coeffs() * s);
}

template <typename Scalar>
TrigPoly<Scalar> add_constant(const TrigPoly<Scalar>& p, Scalar s) {
  return add(p, TrigPoly<Scalar>::constant(s));
}

template <typename Scalar>
TrigPoly<Scalar> operator+(const TrigPoly<Scalar>& p, const TrigPoly<Scalar>& q) { return add(p, q); }
template <typename Scalar>
TrigPoly<Scalar> operator*(const TrigPoly<Scalar>& p, const TrigPoly<Scalar>& q) { return multiply(p, q); }
template <typename Scalar>
TrigPoly<Scalar> operator*(Scalar s, const TrigPoly<Scalar>& p) { return scale(p, s); }

// Lower estimate of sup|p|: max over oversample*(2fc+1) equispaced samples.
// On a grid of spacing h the true sup exceeds it by at most pi*fc*h*sup|p| (Bernstein).
template <typename Scalar>
Scalar sup_norm_estimate(const TrigPoly<Scalar>& p, int oversample = 16) {
  if (oversample < 1) throw std::invalid_argument("sup_norm_estimate: oversample must be positive");
  const int M = oversample * (2 * p.cutoff() + 1);
  return eval_on_grid(p, M).cwiseAbs().maxCoeff();
}

// Fejer kernel (1/N)(1/(fhi+1)) (sin(pi(fhi+1)t)/sin(pi t))^2 as a polynomial.
template <typename Scalar = double>
TrigPoly<Scalar> fejer_kernel(int fhi, int N) {
  if (fhi < 1 || 2 * fhi > N) throw std::invalid_argument("fejer_kernel: need 1 <= fhi <= N/2");
  typename TrigPoly<Scalar>::Coeffs c(2 * fhi + 1);
  for (int k = -fhi; k <= fhi; ++k)
    c(k + fhi) = Scalar(1) / N * (Scalar(1) - Scalar(std::abs(k)) / (fhi + 1));
  return TrigPoly<Scalar>(fhi, c);
}

// Closed-form Fejer kernel value at any t; defined for every fhi >= 1.
template <typename Scalar>
Scalar fejer_value(int fhi, int N, Scalar t) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar u = t - std::round(t);
  const Scalar s = std::sin(pi * u);
  const int n = fhi + 1;
  if (std::abs(s) < Scalar(1e-8)) {
    // sin(pi n u)/sin(pi u) = n (1 - (n^2-1) pi^2 u^2 / 6 + ...)
    const Scalar ratio = n * (Scalar(1) - (Scalar(n) * n - 1) * pi * pi * u * u / 6);
    return ratio * ratio / (Scalar(N) * n);
  }
  const Scalar ratio = std::sin(pi * n * u) / s;
  return ratio * ratio / (Scalar(N) * n);
}

// K(t) = g(t)^4, g(t) = sin(pi n t)/(n sin(pi t)), n = fc/2 + 1.
template <typename Scalar = double>
class Fejer4 {
 public:
  explicit Fejer4(int fc) : fc_(fc), n_(fc / 2 + 1) {
    if (fc < 4) throw std::invalid_argument("Fejer4: fc must be >= 4");
    if (fc % 2 != 0) throw std::invalid_argument("Fejer4: fc must be even");
  }

  // Largest admissible even cutoff not exceeding budget.
  static int admissible_cutoff(int budget) { return budget % 2 == 0 ? budget : budget - 1; }

  int cutoff() const { return fc_; }

  struct Jet {
    Scalar k0, k1, k2;
  };

  Jet jet(Scalar t) const {
    const Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar u = pi * (t - std::round(t));
    Scalar g, gu, guu;
    g_jet(u, g, gu, guu);
    const Scalar g2 = g * g, g3 = g2 * g;
    return {g2 * g2, 4 * g3 * gu * pi, (12 * g2 * gu * gu + 4 * g3 * guu) * pi * pi};
  }

  Scalar operator()(Scalar t) const { return jet(t).k0; }
  Scalar d1(Scalar t) const { return jet(t).k1; }
  Scalar d2(Scalar t) const { return jet(t).k2; }

  // Spectrum of K: autoconvolution of the triangle (1 - |k|/n)/n.
  RealVector<Scalar> coefficients() const {
    const int n = n_;
    RealVector<Scalar> tri(2 * n - 1);
    for (int k = -(n - 1); k <= n - 1; ++k) tri(k + n - 1) = (Scalar(1) - Scalar(std::abs(k)) / n) / n;
    RealVector<Scalar> c = RealVector<Scalar>::Zero(2 * fc_ + 1);
    for (int a = 0; a < 2 * n - 1; ++a)
      for (int b = 0; b < 2 * n - 1; ++b) c(a + b) += tri(a) * tri(b);
    return c;
  }

 private:
  // g and its u-derivatives with u = pi t reduced to [-pi/2, pi/2].
  void g_jet(Scalar u, Scalar& g, Scalar& gu, Scalar& guu) const {
    const int n = n_;
    if (std::abs(n * u) < Scalar(1)) {
      // g(u) = (1/n) sum_j cos(m_j u), m_j = n-1-2j
      g = gu = guu = 0;
      for (int j = 0; j < n; ++j) {
        const Scalar m = Scalar(n - 1 - 2 * j);
        const Scalar c = std::cos(m * u), s = std::sin(m * u);
        g += c;
        gu -= m * s;
        guu -= m * m * c;
      }
      g /= n;
      gu /= n;
      guu /= n;
      return;
    }
    const Scalar s = std::sin(u), c = std::cos(u);
    const Scalar S = std::sin(n * u), C = std::cos(n * u);
    g = S / (n * s);
    gu = (n * C * s - S * c) / (n * s * s);
    guu = S * (Scalar(1) - Scalar(n) * n) / (n * s) - 2 * c * gu / s;
  }

  int fc_;
  int n_;
};

}  // namespace srfine
