#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lotex/diffusions.hpp"
#include "lotex/localtime.hpp"
#include "lotex/parallel.hpp"
#include "lotex/paths.hpp"
#include "lotex/quadrature.hpp"
#include "lotex/rng.hpp"
#include "lotex/stats.hpp"

using namespace lotex;

TEST(Scale, Brownian) {
  const DiffusionSpec bm = brownian_spec();
  for (double x : {-2.0, -0.5, 0.0, 0.3, 4.0}) EXPECT_NEAR(scale_function(bm, x), x, 1e-12);
  EXPECT_NEAR(speed_density(bm, 1.7), 1.0, 1e-12);
}

TEST(Scale, Bessel3) {
  const DiffusionSpec b = bessel_spec(3.0, 1.0);
  EXPECT_NEAR(scale_function(b, 2.0), 0.5, 1e-6);
  EXPECT_NEAR(scale_function(b, 0.5), -1.0, 1e-6);
  EXPECT_NEAR(speed_density(b, 2.0) / speed_density(b, 1.0), 4.0, 1e-6);
}

TEST(Scale, OrnsteinUhlenbeck) {
  const DiffusionSpec ou = ou_spec(1.0);
  // int_0^1 e^{y^2} dy by its power series.
  double series = 0.0, term = 1.0;
  for (int k = 0; k < 40; ++k) {
    series += term / (2 * k + 1);
    term /= (k + 1);
  }
  EXPECT_NEAR(scale_function(ou, 1.0), series, 1e-6 * series);
  EXPECT_NEAR(scale_function(ou, 1.0), 1.462652, 1e-6);
  EXPECT_NEAR(speed_density(ou, 1.0) / speed_density(ou, 0.0), std::exp(-1.0), 1e-9);
  EXPECT_NEAR(scale_derivative(ou, 1.0), 1.0 / speed_density(ou, 1.0), 1e-9);
}

TEST(Scale, TableIsIncreasing) {
  const ScaleTable t = tabulate(bangbang_spec(1.0), -2.0, 2.0, 401);
  EXPECT_NEAR(t(0.0), 0.0, 1e-9);
  for (Eigen::Index i = 1; i < t.h.size(); ++i) EXPECT_GT(t.h(i), t.h(i - 1));
  EXPECT_GT(t.dh.minCoeff(), 0.0);
  const DiffusionSpec ou = ou_spec(1.0);
  const ScaleTable u = tabulate(ou, -2.0, 2.0, 81);
  for (Eigen::Index i = 0; i < u.x.size(); i += 10) {
    EXPECT_NEAR(u.h(i), scale_function(ou, u.x(i)), 1e-9 * std::max(1.0, std::abs(u.h(i))));
    EXPECT_NEAR(u.dh(i), scale_derivative(ou, u.x(i)), 1e-9 * u.dh(i));
  }
}

TEST(Scale, DivergentIntegralNamesTheSingularity) {
  try {
    scale_function(bessel_spec(3.0, 1.0), 0.0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("0"), std::string::npos);
  }
}

TEST(Scale, ScaledProcessHasNoDrift) {
  const DiffusionSpec spec = bangbang_spec(1.0);
  const ScaleTable h = tabulate(spec, -6.0, 6.0, 6001);
  const TimeGrid grid = TimeGrid::over(1.0, 1e-3);
  const auto inc = parallel_map(10000, [&](std::size_t i) {
    const Path p = sample_sde(spec.drift, spec.sigma, 0.3, grid, mix_seed(1, i));
    return h(p.end()) - h(0.3);
  });
  EXPECT_TRUE(moment_test(inc, 0.0, 4.0, 2e-3).passed);
}

TEST(DiffusionLocalTime, BrownianReducesToOccupation) {
  const Path p = sample_brownian(TimeGrid::over(1.0, 1e-4), 0.0, 2);
  EXPECT_NEAR(diffusion_local_time(p, brownian_spec(), 0.0, 0.02), occupation_local_time(p, 0.0, 1.0, 0.02), 1e-9);
  const Path far = sample_brownian(TimeGrid::over(0.01, 1e-4), 0.0, 3);
  EXPECT_EQ(diffusion_local_time(far, brownian_spec(), 5.0, 0.02), 0.0);
}

TEST(DiffusionLocalTime, ScaleDerivativeTimesSemimartingaleLocalTime) {
  const DiffusionSpec spec = bangbang_spec(1.0);
  const double x = 0.5, dt = 1e-4, eps = 0.02;
  const TimeGrid grid = TimeGrid::over(1.0, dt);
  const auto rows = parallel_map(4000, [&](std::size_t i) {
    const Path p = sample_sde(spec.drift, spec.sigma, 0.0, grid, mix_seed(4, i));
    return std::array<double, 2>{diffusion_local_time(p, spec, x - 0.5 * eps, eps),
                                 scale_derivative(spec, x) * tanaka_local_time(p, x, 1.0).value};
  });
  double a = 0.0, b = 0.0;
  for (const auto& r : rows) {
    a += r[0];
    b += r[1];
  }
  EXPECT_NEAR(a / b, 1.0, 0.05);
}

TEST(HeightTail, BrownianProductIsFlat) {
  const double dt = 1e-3;
  const TimeGrid grid = TimeGrid::over(10.0, dt);
  std::vector<Path> paths;
  for (std::size_t i = 0; i < 600; ++i) paths.push_back(sample_brownian(grid, 0.0, mix_seed(5, i)));
  const Eigen::ArrayXd a = (Eigen::ArrayXd(3) << 0.2, 0.5, 1.0).finished();
  const HeightTail t = excursion_height_tail_diffusion(brownian_spec(), paths, a, 0.0, 0.02);
  for (Eigen::Index j = 1; j < a.size(); ++j) EXPECT_LE(t.rate(j), t.rate(j - 1));
  const double ref = t.product.mean();
  for (Eigen::Index j = 0; j < a.size(); ++j)
    EXPECT_NEAR(t.product(j) / ref, 1.0, 0.05 + 4.0 * t.se(j) * t.scale(j) / ref);
}

TEST(Ou, CandidatesAndExactExponent) {
  // The exact exponent lies between nothing and everything: it is finite and increasing in mu.
  double prev = 0.0;
  for (double mu : {0.25, 0.5, 1.0, 2.0}) {
    const double e = ou_exact_exponent(1.0, mu);
    EXPECT_GT(e, prev);
    prev = e;
  }
  // A pure exponential tilt of the stable(1/2) measure has a closed-form exponent.
  for (double theta : {1e-6, 0.5, 1.0})
    for (double mu : {0.5, 2.0})
      EXPECT_NEAR(ou_laplace_exponent(0, theta, mu), std::sqrt(2.0 * mu + theta) - std::sqrt(theta), 1e-7);
  // theta -> 0 collapses every candidate onto the Brownian exponent sqrt(2 mu), at rate sqrt(theta).
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(ou_laplace_exponent(c, 1e-6, 1.0), std::sqrt(2.0), 3e-3);
  EXPECT_NEAR(ou_exact_exponent(1e-6, 1.0), std::sqrt(2.0), 1e-3);
  EXPECT_GT(ou_levy_density(0, 1.0, 1.0), 0.0);
}

TEST(Ou, SmallThetaMatchesBrownianTau) {
  OuExperimentOptions o;
  o.theta = 1e-3;
  o.n_paths = 1500;
  o.dt = 1e-3;
  o.seed = 6;
  o.horizon = 100.0;
  const TestReport r = ou_inverse_lt_experiment(o);
  EXPECT_TRUE(r.passed);
  EXPECT_TRUE(r.details.count("verdict"));
}

TEST(Ou, InverseLocalTimeIncrementsUncorrelated) {
  const Eigen::ArrayXXd tau = ou_inverse_local_times(1.0, 0.5, 2, 1500, 1e-3, 7, 100.0);
  ASSERT_EQ(tau.cols(), 2);
  std::vector<double> first, second;
  for (Eigen::Index i = 0; i < tau.rows(); ++i) {
    if (!std::isfinite(tau(i, 1))) continue;
    EXPECT_LE(tau(i, 0), tau(i, 1));
    first.push_back(std::exp(-tau(i, 0)));
    second.push_back(std::exp(-(tau(i, 1) - tau(i, 0))));
  }
  EXPECT_TRUE(correlation_test(first, second).passed);
}
