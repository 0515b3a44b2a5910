#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lotex/localtime.hpp"
#include "lotex/parallel.hpp"
#include "lotex/paths.hpp"
#include "lotex/quadrature.hpp"
#include "lotex/reflaws.hpp"
#include "lotex/rng.hpp"
#include "lotex/stats.hpp"

using namespace lotex;

namespace {

Path constant_path(double value, std::size_t steps, double dt) {
  Path p;
  p.grid = TimeGrid{dt, steps};
  p.values = Eigen::ArrayXd::Constant(static_cast<Eigen::Index>(steps + 1), value);
  return p;
}

}  // namespace

TEST(Occupation, ConstantPathAwayFromLevel) {
  const Path p = constant_path(5.0, 100, 0.01);
  EXPECT_EQ(occupation_local_time(p, 0.0, 1.0, 0.1), 0.0);
  EXPECT_NEAR(occupation_local_time(p, 4.95, 1.0, 0.1), 10.0, 1e-12);
}

TEST(Occupation, SecondMomentMatchesBrownianSquare) {
  const double dt = 1e-4, eps = 0.01;
  const TimeGrid grid = TimeGrid::over(1.0, dt);
  const auto l2 = parallel_map(20000, [&](std::size_t i) {
    const double l = centered_local_time(sample_brownian(grid, 0.0, mix_seed(1, i)), 0.0, 1.0, eps);
    return l * l;
  });
  EXPECT_NEAR(mean(l2), 1.0, 0.03 + 4.0 * std_error(l2));
}

TEST(Occupation, LawOfAbsoluteBrownian) {
  const double dt = 1e-4;
  const TimeGrid grid = TimeGrid::over(1.0, dt);
  const std::size_t n = 4000;
  std::vector<double> l(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    l[i] = centered_local_time(sample_brownian(grid, 0.0, mix_seed(2, i)), 0.0, 1.0, default_epsilon(dt));
    Rng rng(mix_seed(3, i));
    b[i] = std::abs(rng.normal());
  }
  EXPECT_TRUE(ks_two_sample(l, b, 0.02).passed);
  EXPECT_TRUE(moment_test(l, std::sqrt(2.0 / M_PI), 4.0, 0.01).passed);
}

TEST(Tanaka, ZeroAbovePathMaximum) {
  const Path p = sample_brownian(TimeGrid::over(1.0, 1e-3), 0.0, 4);
  const TanakaEstimate t = tanaka_local_time(p, p.values.maxCoeff() + 0.1, 1.0);
  EXPECT_EQ(t.value, 0.0);
  EXPECT_EQ(t.raw, 0.0);
}

TEST(Tanaka, AgreesWithOccupation) {
  const double dt = 1e-4;
  const TimeGrid grid = TimeGrid::over(1.0, dt);
  const auto rows = parallel_map(2000, [&](std::size_t i) {
    const Path p = sample_brownian(grid, 0.0, mix_seed(5, i));
    const TanakaEstimate t = tanaka_local_time(p, 0.0, 1.0);
    EXPECT_GE(t.value, 0.0);
    EXPECT_EQ(t.value, std::max(t.raw, 0.0));
    return std::array<double, 2>{t.raw, std::abs(t.value - centered_local_time(p, 0.0, 1.0, 0.01))};
  });
  std::vector<double> raw, gap;
  for (const auto& g : rows) {
    raw.push_back(g[0]);
    gap.push_back(g[1]);
  }
  // The discrete Tanaka sum is a martingale correction, so its mean is E|B_1|.
  EXPECT_TRUE(moment_test(raw, std::sqrt(2.0 / M_PI)).passed);
  // Pathwise gap of order dt^(1/4).
  EXPECT_LE(mean(gap), 1.5 * std::pow(dt, 0.25));
}

TEST(InverseLocalTime, ZeroLevel) {
  const Path p = sample_brownian(TimeGrid::over(1.0, 1e-3), 0.0, 6);
  ASSERT_TRUE(inverse_local_time(p, 0.0, 0.05).has_value());
  EXPECT_EQ(*inverse_local_time(p, 0.0, 0.05), 0.0);
  EXPECT_FALSE(inverse_local_time(constant_path(3.0, 10, 0.1), 1.0, 0.05).has_value());
}

TEST(InverseLocalTime, LaplaceTransformAtOne) {
  const double dt = 1e-3;
  const double horizon = 60.0;
  const TimeGrid grid = TimeGrid::over(horizon, dt);
  const auto tau = parallel_map(3000, [&](std::size_t i) {
    const auto t = inverse_local_time(sample_brownian(grid, 0.0, mix_seed(7, i)), 1.0, default_epsilon(dt));
    return t ? *t : horizon;
  });
  std::vector<double> e(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i) e[i] = tau[i] < horizon ? std::exp(-tau[i]) : 0.0;
  EXPECT_NEAR(mean(e), std::exp(-std::sqrt(2.0)), 0.02 + 4.0 * std_error(e));
  // Paths that miss the level by the horizon are censored there.
  const Law stable = law_catalog("stable_half", {1.0});
  const auto censored = [&](double x) { return x < horizon ? stable.cdf(x) : 1.0; };
  EXPECT_TRUE(ks_one_sample(tau, censored, 0.02).passed);
}

TEST(Functionals, PositivePath) {
  Path p = constant_path(1.0, 100, 0.01);
  p.values(0) = 0.0;
  const PathFunctionals f = path_functionals(p, 1.0);
  EXPECT_EQ(f.g_t, 0.0);
  EXPECT_NEAR(f.A_plus, 0.99, 1e-12);
  EXPECT_TRUE(std::isinf(f.d_t));
  EXPECT_EQ(f.S_t, 1.0);
  EXPECT_EQ(f.I_t, 0.0);
}

TEST(Functionals, InterpolatedZeros) {
  Path p;
  p.grid = TimeGrid{1.0, 4};
  p.values.resize(5);
  p.values << 0.0, 1.0, -1.0, -2.0, 3.0;
  const PathFunctionals f = path_functionals(p, 2.0, 0.1);
  EXPECT_NEAR(f.g_t, 1.5, 1e-12);
  EXPECT_NEAR(f.d_t, 3.4, 1e-12);
  EXPECT_EQ(f.S_t, 1.0);
  EXPECT_EQ(f.I_t, -1.0);
}

TEST(Functionals, ArcsineAndSupremum) {
  const double dt = 1e-4;
  const TimeGrid grid = TimeGrid::over(1.0, dt);
  const std::size_t n = 4000;
  const auto rows = parallel_map(n, [&](std::size_t i) {
    const PathFunctionals f = path_functionals(sample_brownian(grid, 0.0, mix_seed(8, i)), 1.0);
    Rng rng(mix_seed(9, i));
    return std::array<double, 3>{f.g_t, f.S_t, std::abs(rng.normal())};
  });
  std::vector<double> g, s, b;
  for (const auto& r : rows) {
    EXPECT_LE(r[0], 1.0);
    g.push_back(r[0]);
    s.push_back(r[1]);
    b.push_back(r[2]);
  }
  EXPECT_TRUE(ks_one_sample(g, law_catalog("arcsine").cdf).passed);
  EXPECT_TRUE(ks_two_sample(s, b, 0.02).passed);
}

TEST(Curve, TotalMassAndSupport) {
  const double dt = 1e-4;
  const Path p = sample_brownian(TimeGrid::over(1.0, dt), 0.0, 10);
  const double eps = 0.01;
  const double lo = p.values.minCoeff() - 2 * eps, hi = p.values.maxCoeff() + 2 * eps;
  const auto m = static_cast<Eigen::Index>((hi - lo) / eps);
  const Eigen::ArrayXd levels = Eigen::ArrayXd::LinSpaced(m + 1, lo, lo + eps * static_cast<double>(m));
  const LocalTimeCurve c = local_time_curve(p, levels, 1.0, eps);
  EXPECT_NEAR(c.values.sum() * eps, 1.0, 0.02);
  EXPECT_GE(c.values.minCoeff(), 0.0);
  for (Eigen::Index i = 0; i < levels.size(); ++i)
    if (levels(i) < p.values.minCoeff() - eps || levels(i) > p.values.maxCoeff()) EXPECT_EQ(c.values(i), 0.0);
}

TEST(Curve, OccupationIdentityForSquare) {
  const double dt = 1e-4, eps = 0.005;
  const Path p = sample_brownian(TimeGrid::over(1.0, dt), 0.0, 11);
  const double lo = p.values.minCoeff() - eps, hi = p.values.maxCoeff() + eps;
  const auto m = static_cast<Eigen::Index>((hi - lo) / eps) + 1;
  const Eigen::ArrayXd levels = lo + eps * Eigen::ArrayXd::LinSpaced(m, 0.0, static_cast<double>(m - 1));
  const LocalTimeCurve c = local_time_curve(p, levels, 1.0, eps);
  const double direct = (p.values.head(p.values.size() - 1).square()).sum() * dt;
  const double by_levels = ((levels + 0.5 * eps).square() * c.values).sum() * eps;
  EXPECT_NEAR(by_levels, direct, 0.02 * direct + 1e-3);
}

TEST(LocalTime, NondecreasingAndFlatAway) {
  const double dt = 1e-3, eps = 0.05;
  const Path p = sample_brownian(TimeGrid::over(1.0, dt), 0.0, 12);
  double prev = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double t = 0.01 * k;
    const double l = centered_local_time(p, 0.0, t, eps);
    EXPECT_GE(l, prev);
    const auto i = static_cast<Eigen::Index>(std::lround(t / dt));
    const auto j = static_cast<Eigen::Index>(std::lround((t - 0.01) / dt));
    if ((p.values.segment(j, i - j + 1).abs() > eps).all()) EXPECT_EQ(l, prev);
    prev = l;
  }
}

TEST(LocalTime, ScalingIsExact) {
  const double c = 4.0, dt = 1e-3, eps = 0.02;
  const Path p = sample_brownian(TimeGrid::over(4.0, dt), 0.0, 13);
  Path scaled;
  scaled.grid = TimeGrid{dt / c, p.grid.n_steps};
  scaled.values = p.values / std::sqrt(c);
  const double lhs = occupation_local_time(scaled, 0.0, 1.0, eps / std::sqrt(c));
  const double rhs = occupation_local_time(p, 0.0, 4.0, eps) / std::sqrt(c);
  EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, rhs));
}

TEST(BridgeLocalTime, ExactLaw) {
  // Local time at 0 of a bridge from 0 to 0 over unit time is Rayleigh.
  std::vector<double> l(20000);
  for (std::size_t i = 0; i < l.size(); ++i) {
    Rng rng(mix_seed(14, i));
    l[i] = bridge_local_time(0.0, 0.0, 1.0, rng.uniform_pos());
  }
  EXPECT_TRUE(ks_one_sample(l, law_catalog("rayleigh").cdf).passed);
  EXPECT_EQ(bridge_local_time(1.0, 1.0, 1e-4, 0.5), 0.0);
  EXPECT_TRUE(bridge_misses(1.0, 1.0, 1e-4));
  EXPECT_FALSE(bridge_misses(-0.01, 0.01, 1e-4));
}
