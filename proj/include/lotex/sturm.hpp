// Sturm-Liouville problems behind the Ray-Knight Laplace functionals and the
// Feynman-Kac resolvent, solved through the Riccati variable w = u'/u.

#ifndef LOTEX_STURM_HPP
#define LOTEX_STURM_HPP

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace lotex {

struct PotentialSpec {
  std::function<double(double)> f;               ///< continuous part; empty means 0
  std::vector<std::pair<double, double>> atoms;  ///< (location, mass)
  std::vector<double> breakpoints;               ///< discontinuities of f
  double x_max = 0.0;                            ///< truncation; <= 0 selects a default

  double operator()(double x) const { return f ? f(x) : 0.0; }
};

struct SLSolution {
  Eigen::ArrayXd x;
  Eigen::ArrayXd u;
  Eigen::ArrayXd du;
  double du0_plus = 0.0;
  double du0_minus = 0.0;
  double integral = 0.0;
  bool trivial = false;  ///< potential identically zero
};

/// Bounded decreasing solution of Phi'' = Phi * (f dx + atoms) on [0, x_max],
/// Phi(0) = 1, with Phi'(a+) - Phi'(a-) = mass * Phi(a) at each atom.
/// Integrated backward from x_max with Phi'/Phi = -sqrt(f(x_max)).
SLSolution solve_decreasing(const PotentialSpec& pot, double step = 1e-3);

/// Decaying solution of u'' = 2(k + f) u on the line with u'(0+) - u'(0-) = -2.
/// With `literal` the factor 2 is dropped: u'' = (k + f) u.
SLSolution solve_feynman_kac(double k, const PotentialSpec& f, bool literal = false, double step = 1e-3);

/// max |u'' - rate * u| / max u on the grid, with u'' from a five-point
/// stencil; points within two steps of 0, an atom or a breakpoint are skipped.
double ode_residual(const SLSolution& sol, const std::function<double(double)>& rate,
                    const std::vector<double>& skip = {});

/// int q(x) u(x) dx by the trapezoid rule on the solution grid.
double integrate_against(const SLSolution& sol, const std::function<double(double)>& q);

/// Linear interpolation of u.
double evaluate(const SLSolution& sol, double x);

struct ResolventEstimate {
  double value = 0.0;
  double se = 0.0;
};

/// (1/k) E[q(B_T) exp(-int_0^T f(B_s) ds)] with T ~ Exp(k), the integral by
/// the trapezoid rule on a grid of step dt (the final step shortened to end at T).
ResolventEstimate resolvent_mc(const std::function<double(double)>& q, double k,
                               const std::function<double(double)>& f, std::size_t n, double dt,
                               std::uint64_t seed);

}  // namespace lotex

#endif  // LOTEX_STURM_HPP
