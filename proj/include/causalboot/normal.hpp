#pragma once

namespace causalboot {

// Standard normal distribution function, Phi(z).
double normal_cdf(double z);

// Inverse of Phi, accurate to full double precision (Wichura's PPND16
// rational approximations).  Requires 0 < p < 1.
double normal_quantile(double p);

// Phi^{-1}(0.975), the half-width multiplier a reported interval is
// divided by to yield its implied standard error.
inline constexpr double kZ975 = 1.959963984540054;

}  // namespace causalboot
