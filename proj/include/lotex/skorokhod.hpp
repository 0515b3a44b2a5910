// Azema-Yor solution of the Skorokhod embedding problem for centered targets.

#ifndef LOTEX_SKOROKHOD_HPP
#define LOTEX_SKOROKHOD_HPP

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "lotex/stats.hpp"

namespace lotex {

/// A centered probability measure, either finitely many atoms or a quantile
/// function tabulated on equally spaced probability nodes.
struct TargetMeasure {
  std::vector<std::pair<double, double>> atoms;  ///< (value, probability), ascending values
  Eigen::ArrayXd quantile_nodes;                 ///< Q(j / M), j = 0..M
  Eigen::ArrayXd psi_nodes;                      ///< Psi at each atom or quantile node
  double mean = 0.0;
  double variance = 0.0;

  bool is_discrete() const noexcept { return !atoms.empty(); }
  double top() const;
  double bottom() const;

  static TargetMeasure from_atoms(std::vector<std::pair<double, double>> atoms);
  /// Quantile function on [0, 1]; the end points must be finite.
  static TargetMeasure from_quantile(const std::function<double(double)>& quantile, std::size_t nodes = 10000);
};

/// Psi(x) = E[Y | Y >= x]; +infinity above the top of the support.
double hardy_littlewood(const TargetMeasure& mu, double x);

/// Right-continuous inverse of Psi: inf{x : Psi(x) > l}.
double hardy_littlewood_inverse(const TargetMeasure& mu, double l);

/// P(S_T >= x) = exp(-int_0^x dl / (l - Phi(l))), with exact log pieces where
/// Phi is piecewise constant.
double supremum_survival(const TargetMeasure& mu, double x);

struct Embedding {
  double B_T = 0.0;
  double S_T = 0.0;
  double T = 0.0;
  bool capped = false;
};

/// Brownian path on a grid of step dt stopped at the first time S >= Psi(B),
/// the crossing located by bisection inside the last step. The horizon is
/// doubled up to `max_doublings` times before the run is reported as capped.
Embedding azema_yor_embed(const TargetMeasure& mu, double dt, std::uint64_t seed, double horizon = 50.0,
                          int max_doublings = 4);

std::vector<Embedding> azema_yor_sample(const TargetMeasure& mu, std::size_t n, double dt, std::uint64_t seed,
                                        double horizon = 50.0);

/// One-sample KS of S_T against 1 - supremum_survival, bias tolerance 0.02.
/// Details carry the cap-hit count and the minimum of S_T - B_T.
TestReport supremum_law_check(const TargetMeasure& mu, std::size_t n, std::uint64_t seed, double dt = 1e-4);

}  // namespace lotex

#endif  // LOTEX_SKOROKHOD_HPP
