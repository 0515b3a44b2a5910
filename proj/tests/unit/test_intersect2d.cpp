#include <cmath>

#include <gtest/gtest.h>

#include "lotex/intersect2d.hpp"
#include "lotex/paths.hpp"

using namespace lotex;

TEST(Mollifier, TentIntegratesToOne) {
  EXPECT_EQ(tent_mollifier(Eigen::Vector2d(0.0, 0.0)), 1.0);
  EXPECT_EQ(tent_mollifier(Eigen::Vector2d(1.0, 0.0)), 0.0);
  double sum = 0.0;
  const int m = 400;
  const double h = 2.0 / m;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) sum += tent_mollifier(Eigen::Vector2d(-1.0 + (i + 0.5) * h, -1.0 + (j + 0.5) * h));
  EXPECT_NEAR(sum * h * h, 1.0, 1e-4);
}

TEST(Estimate, StraightLine) {
  // Along (t, 0) the double integral is int_0^1 (1 - r) f_n(r - 1/2, 0) dr = n / 2.
  const double n = 10.0;
  PlanarPath p;
  p.grid = TimeGrid::over(1.0, 1.0 / 4000.0);
  p.points.resize(2, static_cast<Eigen::Index>(p.grid.n_steps + 1));
  for (Eigen::Index i = 0; i < p.points.cols(); ++i) p.points.col(i) = Eigen::Vector2d(p.grid.time(i), 0.0);
  EXPECT_NEAR(intersection_estimate(p, Eigen::Vector2d(0.5, 0.0), n), n / 2.0, 1e-3);
  EXPECT_EQ(intersection_estimate(p, Eigen::Vector2d(0.0, 0.5), n), 0.0);
}

TEST(Estimate, SupersetOfPairs) {
  const PlanarPath p = sample_planar(TimeGrid::over(1.0, 1.0 / 1024.0), 5);
  const Eigen::Vector2d y(0.5, 0.0);
  EXPECT_GE(intersection_estimate(p, y, 20.0), intersection_estimate(p, y, 20.0, 0.5));
}

TEST(Expected, LimitsAndMonotonicity) {
  EXPECT_LT(expected_alpha(Eigen::Vector2d(30.0, 0.0), 1.0), 1e-12);
  double prev = INFINITY;
  for (double r : {0.1, 0.3, 0.5, 1.0, 2.0}) {
    const double v = expected_alpha(Eigen::Vector2d(r, 0.0), 1.0);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_NEAR(expected_alpha(Eigen::Vector2d(0.5, 0.0), 1.0), expected_alpha(Eigen::Vector2d(0.0, 0.5), 1.0), 1e-14);
}

TEST(Sample, MeanMatchesQuadrature) {
  const Eigen::Vector2d y(0.5, 0.0);
  const IntersectionSample s = intersection_sample(y, 20.0, 1.0, 1024, 1500, 6);
  const double target = expected_alpha(y, 1.0);
  EXPECT_NEAR(s.mean, target, 0.05 * target + 4.0 * s.se);
}

TEST(Sample, Isotropy) {
  const IntersectionSample a = intersection_sample(Eigen::Vector2d(0.5, 0.0), 20.0, 1.0, 1024, 800, 7);
  const IntersectionSample b = intersection_sample(Eigen::Vector2d(0.0, 0.5), 20.0, 1.0, 1024, 800, 8);
  EXPECT_LE(std::abs(a.mean - b.mean), 4.0 * std::hypot(a.se, b.se));
}
