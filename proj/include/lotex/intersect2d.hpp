// Self-intersection local time of planar Brownian motion at a displacement.

#ifndef LOTEX_INTERSECT2D_HPP
#define LOTEX_INTERSECT2D_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "lotex/paths.hpp"

namespace lotex {

/// Tent product f(x) = (1 - |x1|)+ (1 - |x2|)+, which integrates to 1.
double tent_mollifier(const Eigen::Vector2d& x);

/// Sum over grid pairs i < j with t_j <= t of f_n(B_j - B_i - y) dt^2, where
/// f_n(x) = n^2 f(n x). Pairs are found through a spatial hash with cell side
/// 1/n, so only pairs inside the mollifier support are visited. t <= 0 means
/// the whole path.
double intersection_estimate(const PlanarPath& path, const Eigen::Vector2d& y, double n, double t = 0.0);

/// Quadrature of int_0^t (t - u) exp(-|y|^2 / 2u) / (2 pi u) du.
double expected_alpha(const Eigen::Vector2d& y, double t);

struct IntersectionSample {
  std::vector<double> values;
  double mean = 0.0;
  double se = 0.0;
};

/// Estimates on `n_paths` independent planar paths with `steps` steps over [0, t].
IntersectionSample intersection_sample(const Eigen::Vector2d& y, double n, double t, std::size_t steps,
                                       std::size_t n_paths, std::uint64_t seed);

}  // namespace lotex

#endif  // LOTEX_INTERSECT2D_HPP
