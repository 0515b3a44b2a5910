// One-dimensional diffusions dX = b(X) dt + sigma(X) dB: scale functions,
// speed densities, diffusion local times and excursion statistics.

#ifndef LOTEX_DIFFUSIONS_HPP
#define LOTEX_DIFFUSIONS_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lotex/paths.hpp"
#include "lotex/stats.hpp"

namespace lotex {

struct DiffusionSpec {
  std::string name;
  std::function<double(double)> drift;
  std::function<double(double)> sigma;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  double base_point = 0.0;  ///< h(base_point) = 0 and h'(base_point) = 1

  bool contains(double x) const noexcept { return x > lower && x < upper; }
};

DiffusionSpec brownian_spec();
DiffusionSpec ou_spec(double theta);
/// Bessel process of dimension d: drift (d - 1) / (2x) on (0, inf).
DiffusionSpec bessel_spec(double dimension, double base_point = 1.0);
/// dX = dB - lambda sgn(X) dt.
DiffusionSpec bangbang_spec(double lambda);

/// h'(x) = exp(-int_{x0}^x 2b/sigma^2).
double scale_derivative(const DiffusionSpec& spec, double x);
/// h(x) = int_{x0}^x h'(y) dy by nested adaptive quadrature.
double scale_function(const DiffusionSpec& spec, double x);
/// 1 / (h'(x) sigma^2(x)).
double speed_density(const DiffusionSpec& spec, double x);

/// Scale function tabulated on a uniform grid, with linear interpolation.
struct ScaleTable {
  Eigen::ArrayXd x;
  Eigen::ArrayXd h;
  Eigen::ArrayXd dh;

  double operator()(double at) const;
};

ScaleTable tabulate(const DiffusionSpec& spec, double lo, double hi, std::size_t points);

/// Occupation time of [x, x + eps) divided by the speed measure of the window.
double diffusion_local_time(PathView path, const DiffusionSpec& spec, double x, double eps);

struct HeightTail {
  Eigen::ArrayXd a;
  Eigen::ArrayXd rate;     ///< crossings per unit diffusion local time at the base level
  Eigen::ArrayXd se;
  Eigen::ArrayXd scale;    ///< h(a) - h(base level)
  Eigen::ArrayXd product;  ///< rate * scale; constant when n(M >= a) is proportional to 1/h(a)
  double local_time = 0.0; ///< mean diffusion local time at the base level per path
  bool transient_suspect = false;
};

/// Estimates n(M >= a) for excursions above `level`: upcrossings from `level`
/// to each a per unit diffusion local time at `level` (centered window eps).
/// Grid thresholds are moved towards each other by 0.5826 sigma sqrt(dt), the
/// discrete-monitoring correction of a Gaussian random walk. The excursion in
/// progress at the horizon contributes P_x(T_a < T_level), the scale-function
/// ratio at its last value x, so paths of a fixed horizon give unbiased rates.
HeightTail excursion_height_tail_diffusion(const DiffusionSpec& spec, const std::vector<Path>& paths,
                                           const Eigen::ArrayXd& a_grid, double level, double eps);

/// Levy-measure candidates for the inverse local time of dX = -theta X dt + dB:
/// 0: exp(-theta v / 2) / sqrt(2 pi v^3)
/// 1: exp(-theta v / 2) (theta v / sinh theta v)^{3/2} / sqrt(2 pi v^3)
/// 2: exp(+theta v / 2) (theta v / sinh theta v)^{3/2} / sqrt(2 pi v^3)
double ou_levy_density(int candidate, double theta, double v);
/// Laplace exponent int (1 - e^{-mu v}) Pi(dv) of a candidate.
double ou_laplace_exponent(int candidate, double theta, double mu);
/// Exact exponent 1 / u_mu(0, 0) from the transition density of the process at 0.
double ou_exact_exponent(double theta, double mu);

struct OuExperimentOptions {
  double theta = 1.0;
  double l = 1.0;
  std::size_t n_paths = 20000;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  double horizon = 200.0;
  std::vector<double> mu_grid{0.5, 1.0, 2.0};
};

/// Simulates the inverse local time of the process at 0 and scores every
/// candidate with per-mu z-scores. `statistic` is the smallest worst-case |z|;
/// `passed` is true when at least one candidate fits every grid point within
/// the Bonferroni-adjusted 4 standard errors.
TestReport ou_inverse_lt_experiment(const OuExperimentOptions& options);

/// Inverse local times tau_{l}, tau_{2l}, ... of the process, one row per path.
Eigen::ArrayXXd ou_inverse_local_times(double theta, double l, std::size_t levels, std::size_t n_paths,
                                       double dt, std::uint64_t seed, double horizon);

}  // namespace lotex

#endif  // LOTEX_DIFFUSIONS_HPP
