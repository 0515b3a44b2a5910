#include "lotex/quadrature.hpp"

#include <boost/math/distributions/normal.hpp>

#include "lotex/paths.hpp"

namespace lotex {

namespace {

struct Simpson {
  const RealFn& f;

  double step(double a, double fa, double m, double fm, double b, double fb, double whole, double tol,
              int depth) const {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol || !(b - a > 1e-300))
      return left + right + delta / 15.0;
    return step(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
           step(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace

double integrate(const RealFn& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, tol);
  // Start from a fixed partition so narrow features are not missed by the first estimate.
  constexpr int kPieces = 16;
  const double h = (b - a) / kPieces;
  const Simpson s{f};
  double total = 0.0;
  double x0 = a;
  double f0 = f(x0);
  for (int i = 1; i <= kPieces; ++i) {
    const double x1 = i == kPieces ? b : a + h * i;
    const double m = 0.5 * (x0 + x1);
    const double fm = f(m);
    const double f1 = f(x1);
    const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
    total += s.step(x0, f0, m, fm, x1, f1, whole, tol / kPieces, 48);
    x0 = x1;
    f0 = f1;
  }
  return total;
}

double integrate_to_infinity(const RealFn& f, double a, double tol) {
  const RealFn g = [&](double u) {
    if (u >= 1.0) return 0.0;
    const double w = 1.0 - u;
    const double v = f(a + u / w) / (w * w);
    return std::isfinite(v) ? v : 0.0;
  };
  return integrate(g, 0.0, 1.0, tol);
}

double integrate_line(const RealFn& f, double center, double tol) {
  const RealFn mirrored = [&](double x) { return f(2.0 * center - x); };
  return integrate_to_infinity(f, center, 0.5 * tol) + integrate_to_infinity(mirrored, center, 0.5 * tol);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error("normal_quantile: probability must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

}  // namespace lotex
