#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lotex/paths.hpp"
#include "lotex/quadrature.hpp"
#include "lotex/reflaws.hpp"
#include "lotex/rng.hpp"
#include "lotex/stats.hpp"

using namespace lotex;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t seed, double shift = 0.0) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = shift + rng.normal();
  return x;
}

std::vector<double> exponentials(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.exponential();
  return x;
}

}  // namespace

TEST(KsTwoSample, IdenticalSamples) {
  const auto a = normals(1000, 1);
  const TestReport r = ks_two_sample(a, a);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_TRUE(r.passed);
}

TEST(KsTwoSample, NullCalibration) {
  int failures = 0;
  for (std::uint64_t s = 0; s < 1000; ++s)
    failures += ks_two_sample(normals(2000, mix_seed(2, s)), normals(2000, mix_seed(3, s))).passed ? 0 : 1;
  EXPECT_LE(failures, 10);
}

TEST(KsTwoSample, DetectsShift) {
  EXPECT_FALSE(ks_two_sample(normals(10000, 4), normals(10000, 5, 1.0)).passed);
}

TEST(KsTwoSample, TinySamplesRejected) {
  EXPECT_THROW(ks_two_sample(normals(10, 1), normals(100, 2)), Error);
}

TEST(KsTwoSample, BiasToleranceShiftsTheStatistic) {
  const auto a = normals(5000, 6), b = normals(5000, 7, 0.03);
  const TestReport strict = ks_two_sample(a, b, 0.0);
  const TestReport loose = ks_two_sample(a, b, 0.02);
  EXPECT_EQ(strict.statistic, loose.statistic);
  EXPECT_GE(*loose.p_value, *strict.p_value);
}

TEST(KsTwoSample, PermutationInvariant) {
  auto a = normals(500, 8), b = normals(700, 9);
  const TestReport r1 = ks_two_sample(a, b);
  std::reverse(a.begin(), a.end());
  std::rotate(b.begin(), b.begin() + 100, b.end());
  const TestReport r2 = ks_two_sample(a, b);
  EXPECT_EQ(r1.statistic, r2.statistic);
  EXPECT_EQ(*r1.p_value, *r2.p_value);
}

TEST(KsOneSample, ExactSamplerAndShiftedNull) {
  const auto x = normals(20000, 10);
  EXPECT_TRUE(ks_one_sample(x, normal_cdf).passed);
  EXPECT_FALSE(ks_one_sample(normals(20000, 11, 0.1), normal_cdf).passed);
  const Law a = law_catalog("arcsine");
  const Eigen::ArrayXd g = a.sampler(20000, 12);
  EXPECT_TRUE(ks_one_sample(std::span<const double>(g.data(), static_cast<std::size_t>(g.size())), a.cdf).passed);
}

TEST(KsOneSample, HandlesInfiniteValues) {
  auto x = normals(1000, 13);
  x[0] = INFINITY;
  EXPECT_TRUE(ks_one_sample(x, normal_cdf).passed);
}

TEST(Moment, ConstantSampleAndSecondMoment) {
  const std::vector<double> c(100, 2.5);
  EXPECT_TRUE(moment_test(c, 2.5).passed);
  EXPECT_FALSE(moment_test(c, 2.6).passed);
  auto x = normals(50000, 14);
  for (double& v : x) v *= v;
  EXPECT_TRUE(moment_test(x, 1.0).passed);
  EXPECT_FALSE(moment_test(x, 1.1).passed);
}

TEST(LaplaceGrid, ExponentialAndCorrupted) {
  const std::vector<double> lambdas{0.5, 1.0, 2.0};
  const auto x = exponentials(20000, 15);
  const auto exact = [](double l) { return 1.0 / (1.0 + l); };
  EXPECT_TRUE(laplace_grid_test(x, exact, lambdas).passed);
  auto bad = x;
  for (double& v : bad) v *= 1.1;
  EXPECT_FALSE(laplace_grid_test(bad, exact, lambdas).passed);
}

TEST(LaplaceGrid, StableHalfSample) {
  const Law law = law_catalog("stable_half", {1.0});
  const Eigen::ArrayXd t = law.sampler(20000, 16);
  const std::vector<double> lambdas{0.5, 1.0, 2.0};
  EXPECT_TRUE(laplace_grid_test(std::span<const double>(t.data(), static_cast<std::size_t>(t.size())),
                                [](double l) { return tau_laplace(1.0, l); }, lambdas)
                  .passed);
}

TEST(Dispersion, PoissonAndGeometric) {
  Rng rng(17);
  std::vector<double> pois(20000), geom(20000);
  for (double& v : pois) v = static_cast<double>(rng.poisson(5.0));
  for (double& v : geom) v = std::floor(std::log(rng.uniform_pos()) / std::log(1.0 - 1.0 / 6.0));
  EXPECT_TRUE(dispersion_test(pois).passed);
  EXPECT_FALSE(dispersion_test(geom).passed);
}

TEST(RegressionBins, BernoulliIdentity) {
  Rng rng(18);
  std::vector<double> x(20000), y(20000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.uniform();
    y[i] = rng.uniform() < x[i] ? 1.0 : 0.0;
  }
  EXPECT_TRUE(regression_bin_test(x, y, [](double v) { return v; }).passed);
  EXPECT_FALSE(regression_bin_test(x, y, [](double) { return 0.5; }).passed);
}

TEST(RegressionBins, AbsoluteCap) {
  Rng rng(19);
  std::vector<double> x(2000), y(2000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = rng.uniform();
    y[i] = rng.uniform() < x[i] ? 1.0 : 0.0;
  }
  BinTestOptions opt;
  opt.max_error = 1e-4;
  EXPECT_FALSE(regression_bin_test(x, y, [](double v) { return v; }, opt).passed);
}

TEST(Correlation, IndependentAndDependent) {
  const auto a = normals(10000, 20), b = normals(10000, 21);
  EXPECT_TRUE(correlation_test(a, b).passed);
  EXPECT_FALSE(correlation_test(a, a).passed);
  EXPECT_NEAR(correlation(a, a), 1.0, 1e-12);
}

TEST(CdfBins, UniformSample) {
  Rng rng(22);
  std::vector<double> u(10000);
  for (double& v : u) v = rng.uniform();
  const std::vector<double> edges{0.1, 0.3, 0.5, 0.7, 0.9};
  EXPECT_TRUE(cdf_bin_test(u, [](double v) { return std::clamp(v, 0.0, 1.0); }, edges, 0.03).passed);
  EXPECT_FALSE(cdf_bin_test(u, [](double v) { return std::clamp(v * v, 0.0, 1.0); }, edges, 0.03).passed);
}

TEST(Helpers, KolmogorovAndBonferroni) {
  EXPECT_NEAR(kolmogorov_sf(1.3581), 0.05, 1e-3);
  EXPECT_NEAR(kolmogorov_sf(1.9495), 0.001, 1e-4);
  EXPECT_NEAR(bonferroni_multiplier(4.0, 1), 4.0, 1e-9);
  EXPECT_GT(bonferroni_multiplier(4.0, 3), 4.0);
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(mean(x), 2.5);
  EXPECT_DOUBLE_EQ(variance(x), 5.0 / 3.0);
}
