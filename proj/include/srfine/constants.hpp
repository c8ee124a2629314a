#pragma once

#include <map>
#include <numbers>
#include <string>

namespace srfine::constants {

inline constexpr double kappa = 1.87;
inline constexpr double delta = 0.17;
inline constexpr double c_l = 0.029;
inline constexpr double c_u = 2.0 * std::numbers::pi * std::numbers::pi;
inline constexpr double c_l1 = 8.3e-4;
inline constexpr double c_l2 = c_l1 < c_l ? c_l1 : c_l;

// Interpolant magnitude ingredients.
inline constexpr double ca = 1.05;
inline constexpr double cb = 0.51;
inline constexpr double cgsum = 2.22;
inline constexpr double cgsumd = 38.2;

// Block-system norm bounds at fc >= 128, lambda_c = 1/fc.
inline constexpr double d1_scaled = 0.08;    // lambda_c * ||D1||
inline constexpr double d0_inv = 1.008;      // ||D0^{-1}||
inline constexpr double e_inv_scaled = 0.47; // ||E^{-1}|| / lambda_c^2
inline constexpr double f_inv = 1.009;       // ||F^{-1}||
inline constexpr double d2_inv_scaled = 0.43;// ||D2^{-1}|| / lambda_c^2

// Fejer derivative sums.
inline constexpr double cabshid = 8.0 * std::numbers::pi + 14.0;
inline constexpr double cabshidd = 12.0 * std::numbers::pi * std::numbers::pi + 58.0 * std::numbers::pi / 3.0;

// Full chain c_u0 .. c_u58 and the final stability constant "c".
std::map<std::string, double> stability_chain();
double stability_constant();

}  // namespace srfine::constants
