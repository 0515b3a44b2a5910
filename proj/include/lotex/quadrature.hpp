// Adaptive Simpson quadrature on finite and half-infinite intervals.

#ifndef LOTEX_QUADRATURE_HPP
#define LOTEX_QUADRATURE_HPP

#include <cmath>
#include <functional>

namespace lotex {

using RealFn = std::function<double(double)>;

/// Integral of f over [a, b] to absolute tolerance `tol`.
double integrate(const RealFn& f, double a, double b, double tol = 1e-8);

/// Integral of f over [a, +inf) through the map x = a + u / (1 - u).
double integrate_to_infinity(const RealFn& f, double a, double tol = 1e-8);

/// Integral over the whole line, split at `center`.
double integrate_line(const RealFn& f, double center = 0.0, double tol = 1e-8);

/// Standard normal distribution and survival functions.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
inline double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }
inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

/// Standard normal quantile.
double normal_quantile(double p);

}  // namespace lotex

#endif  // LOTEX_QUADRATURE_HPP
