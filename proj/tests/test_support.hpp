#pragma once

#include "srfine/trig_core.hpp"

#include <complex>
#include <numbers>
#include <random>

namespace srfine::testing {

inline constexpr double pi = std::numbers::pi;

// Random real-valued polynomial with coefficients in the unit box.
inline TrigPolyd random_poly(int fc, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TrigPolyd::Coeffs c(2 * fc + 1);
  c(fc) = {u(rng), 0.0};
  for (int k = 1; k <= fc; ++k) {
    c(fc + k) = {u(rng), u(rng)};
    c(fc - k) = std::conj(c(fc + k));
  }
  return TrigPolyd(fc, c);
}

// Plain-loop evaluation of sum_k c_k exp(-i 2 pi k t); independent of the library's phase recurrence.
inline double direct_eval(const TrigPolyd& p, double t) {
  std::complex<double> acc = 0.0;
  for (int k = -p.cutoff(); k <= p.cutoff(); ++k) acc += p.coeff(k) * std::exp(std::complex<double>(0, -2 * pi * k * t));
  return acc.real();
}

inline TrigPolyd cos_poly() {
  TrigPolyd::Coeffs c(3);
  c << 0.5, 0.0, 0.5;
  return TrigPolyd(1, c);
}

}  // namespace srfine::testing
