// Local-time estimators and the classical path functionals: last zero,
// first zero after t, running extrema, time spent positive.

#ifndef LOTEX_LOCALTIME_HPP
#define LOTEX_LOCALTIME_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Core>

#include "lotex/paths.hpp"

namespace lotex {

/// Occupation-window width used when none is given: step^0.4.
inline double default_epsilon(double step) { return std::pow(step, 0.4); }

struct LocalTimeCurve {
  Eigen::ArrayXd levels;
  Eigen::ArrayXd values;
  double t = 0.0;
  double epsilon = 0.0;
};

struct PathFunctionals {
  double g_t = 0.0;  ///< last zero at or before t
  double d_t = std::numeric_limits<double>::infinity();  ///< first zero after t; infinite if none on the path
  double S_t = 0.0;
  double I_t = 0.0;
  double A_plus = 0.0;
  double L0 = 0.0;
};

struct TanakaEstimate {
  double raw = 0.0;    ///< unclamped Tanaka sum
  double value = 0.0;  ///< max(raw, 0)
};

/// (1/eps) * sum of dt_i over grid points t_i < t with x <= X_i < x + eps.
double occupation_local_time(PathView path, double x, double t, double eps);

/// Occupation estimator on the window [x - eps/2, x + eps/2), which removes
/// the first-order bias of the one-sided window.
inline double centered_local_time(PathView path, double x, double t, double eps) {
  return occupation_local_time(path, x - 0.5 * eps, t, eps);
}

/// 2[(X_t - x)^+ - (X_0 - x)^+ - sum 1{X_i > x}(X_{i+1} - X_i)].
TanakaEstimate tanaka_local_time(PathView path, double x, double t);

/// First grid time at which the running centered occupation estimate at 0
/// exceeds l; empty when the path ends first. l = 0 gives 0.
std::optional<double> inverse_local_time(PathView path, double l, double eps);

/// Functionals at time t, read off the grid points up to the first t_k >= t.
/// Zeros are located by linear interpolation between grid points of opposite
/// sign; exact grid zeros count. A_plus is the left-point sum of dt_i over
/// X_i > 0. L0 uses the centered window of width eps (default_epsilon when
/// eps <= 0).
PathFunctionals path_functionals(PathView path, double t, double eps = 0.0);

/// Occupation estimates at every level (one-sided windows [x, x + eps)).
LocalTimeCurve local_time_curve(PathView path, const Eigen::ArrayXd& levels, double t, double eps);

/// Local time at `level` accrued by a Brownian bridge from a to b over dt,
/// drawn by inversion from P(l > y) = exp(-((|a| + |b| + y)^2 - (b - a)^2) / 2dt)
/// (levels measured from `level`) with u uniform in (0, 1].
inline double bridge_local_time(double a, double b, double dt, double u, double level = 0.0) {
  const double reach = std::abs(a - level) + std::abs(b - level);
  const double d = b - a;
  return std::max(0.0, std::sqrt(d * d - 2.0 * dt * std::log(u)) - reach);
}

/// True when a bridge from a to b over dt reaches `level` with probability
/// below e^-40, so bridge_local_time would return 0 for any practical u.
inline bool bridge_misses(double a, double b, double dt, double level = 0.0) {
  const double p = (a - level) * (b - level);
  return p > 20.0 * dt;
}

/// Streaming centered local time at a level, for samplers that stop on it.
struct RunningLocalTime {
  double level = 0.0;
  double eps = 0.0;
  double value = 0.0;

  /// Accounts for a step of length dt leaving the point x.
  void advance(double x, double dt) noexcept {
    const double d = x - level;
    if (d >= -0.5 * eps && d < 0.5 * eps) value += dt / eps;
  }
};

}  // namespace lotex

#endif  // LOTEX_LOCALTIME_HPP
