// Closed-form reference laws, joint densities and Laplace transforms.

#ifndef LOTEX_REFLAWS_HPP
#define LOTEX_REFLAWS_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace lotex {

/// A reference law. Empty std::function members are not available in closed form.
struct Law {
  std::string name;
  std::vector<double> params;
  std::function<double(double)> density;
  std::function<double(double)> cdf;
  std::function<double(double)> laplace;
  std::function<Eigen::ArrayXd(std::size_t, std::uint64_t)> sampler;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

/// Names accepted by law_catalog.
std::vector<std::string> law_names();

/// Builds a catalog law. Parameters, by name:
///   arcsine                         Beta(1/2, 1/2) on [0, 1]
///   rayleigh                        density x exp(-x^2/2)
///   stable_half        {l}          hitting time of l by Brownian motion
///   bes3_marginal      {t}          Bessel(3) from 0 at time t
///   besq_marginal      {delta, x0, t}
///   reflected_sup      {t}          running maximum S_t, i.e. |N(0, t)|
///   exp                {mean}
///   normal             {mu, sigma}
///   uniform            {a, b}
///   longest_excursion_tau {l}       longest excursion before tau_l
///   watanabe_excursion {l}          P(S_{tau_l} <= x) = exp(-l / (2x))
///   watanabe_printed   {l}          P(S_{tau_l} <= x) = exp(-2l / x)
///   excursion_local_time {x}        local time at x of an excursion reaching x: Exp(mean 2x)
///   height_over_level  {c}          P(M <= x) = 1 - c/x on [c, inf)
///   bangbang           {lambda, t}  bang-bang process from 0 at time t
///   excursion_height                maximum of the Brownian excursion of unit length
Law law_catalog(const std::string& name, std::vector<double> params = {});

/// Density of (S_t, B_t) at (a, b) on the wedge a >= 0, b <= a; zero elsewhere.
double reflection_joint_density(double t, double a, double b);

/// Joint density of (g_t, L_t, B_t) at (s, l, x).
double triple_density(double t, double s, double l, double x);

/// Transition density of the bang-bang process dX = dB - lambda sgn(X) dt,
/// with |y - x| in place of |y|; exact for x = 0.
double bangbang_semigroup(double lambda, double t, double x, double y);

double tau_laplace(double l, double lambda);
double bes3_hit_laplace(double lambda);
double knight_laplace(double mu);
double trivariate_laplace(double lambda, double mu, double alpha);
/// Density of nu_x(dy) = (1/4x^2) exp(-y/2x) dy.
double excursion_lt_levy(double x, double y);
/// E[exp(-mu^2/2 A+_{tau_l}); S_{tau_l} <= a]: exp(-l mu coth(mu a) / 2) when
/// `halved`, the un-halved exponent otherwise.
double coth_functional(double l, double mu, double a, bool halved);

/// Dispatch by name: tau_laplace(l, lambda), bes3_hit_laplace(lambda),
/// knight_laplace(mu), trivariate(lambda, mu, alpha), excursion_lt_levy(x, y),
/// coth_halved(l, mu, a), coth_printed(l, mu, a).
double transform(const std::string& name, std::span<const double> args);

/// Noncentral chi-square law with k degrees of freedom and noncentrality nu,
/// as a Poisson mixture of gamma laws. The density omits the atom at 0 that
/// exists when k = 0.
double noncentral_chi2_density(double x, double k, double nu);
double noncentral_chi2_cdf(double x, double k, double nu);

}  // namespace lotex

#endif  // LOTEX_REFLAWS_HPP
