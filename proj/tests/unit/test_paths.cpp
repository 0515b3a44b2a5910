#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lotex/parallel.hpp"
#include "lotex/paths.hpp"
#include "lotex/reflaws.hpp"
#include "lotex/rng.hpp"
#include "lotex/stats.hpp"

using namespace lotex;

namespace {

std::vector<double> column(std::size_t n, const std::function<double(std::size_t)>& f) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
  return out;
}

}  // namespace

TEST(Grid, OverHitsHorizonExactly) {
  const TimeGrid g = TimeGrid::over(1.0, 3e-4);
  EXPECT_DOUBLE_EQ(g.horizon(), 1.0);
  EXPECT_EQ(g.n_steps, 3333u);
  EXPECT_NEAR(g.step, 3e-4, 1e-7);
  EXPECT_THROW((TimeGrid{0.0, 10}.validate()), Error);
  EXPECT_THROW((TimeGrid{1e-3, 0}.validate()), Error);
}

TEST(Brownian, StartsAtStartExactly) {
  const Path p = sample_brownian(TimeGrid::over(1.0, 1e-3), 0.0, 7);
  EXPECT_EQ(p.values(0), 0.0);
  EXPECT_EQ(p.values.size(), 1001);
  const Path q = sample_brownian(TimeGrid::over(1.0, 1e-3), 2.5, 7);
  EXPECT_EQ(q.values(0), 2.5);
}

TEST(Brownian, SecondMomentAtOne) {
  const TimeGrid grid = TimeGrid::over(1.0, 0.01);
  const auto x = column(100000, [&](std::size_t i) {
    const double b = sample_brownian(grid, 0.0, mix_seed(11, i)).end();
    return b * b;
  });
  EXPECT_TRUE(moment_test(x, 1.0).passed);
}

TEST(Brownian, IndependentIncrements) {
  const TimeGrid grid = TimeGrid::over(1.0, 0.01);
  const std::size_t n = 20000;
  std::vector<double> first(n), second(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Path p = sample_brownian(grid, 0.0, mix_seed(12, i));
    first[i] = p.values(50);
    second[i] = p.end() - p.values(50);
  }
  EXPECT_LE(std::abs(correlation(first, second)), 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST(Brownian, BitIdenticalAcrossThreadCounts) {
  const TimeGrid grid = TimeGrid::over(1.0, 1e-3);
  auto run = [&](int jobs) {
    return parallel_map(64, [&](std::size_t i) { return sample_brownian(grid, 0.0, mix_seed(5, i)).end(); }, jobs);
  };
  EXPECT_EQ(run(1), run(8));
}

TEST(Brownian, RefinementKeepsCoarseMarginals) {
  const TimeGrid grid = TimeGrid::over(1.0, 0.05);
  const std::size_t n = 5000;
  std::vector<double> coarse_mid(n), fine_mid(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Path c = sample_brownian(grid, 0.0, mix_seed(21, i));
    const Path f = refine_brownian(c, mix_seed(22, i));
    ASSERT_EQ(f.values.size(), 2 * c.values.size() - 1);
    EXPECT_EQ(f.values(20), c.values(10));
    coarse_mid[i] = c.values(10);
    fine_mid[i] = sample_brownian(grid, 0.0, mix_seed(23, i)).values(10);
  }
  EXPECT_TRUE(ks_two_sample(coarse_mid, fine_mid).passed);
}

TEST(Bridge, EndpointsAndMidVariance) {
  const double u = 2.0;
  const TimeGrid grid = TimeGrid::over(u, 0.02);
  const Path b = sample_bridge(u, grid, 3);
  EXPECT_EQ(b.values(0), 0.0);
  EXPECT_EQ(b.end(), 0.0);
  const auto sq = column(100000, [&](std::size_t i) {
    const double m = sample_bridge(u, grid, mix_seed(31, i)).values(50);
    return m * m;
  });
  EXPECT_TRUE(moment_test(sq, u / 4.0).passed);
  EXPECT_THROW(sample_bridge(1.0, grid, 1), Error);
}

TEST(Bridge, WeightedBrownianExpectationMatches) {
  // E[F(B) sqrt(u/(u-s)) exp(-B_s^2/2(u-s))] against the bridge, F = 1{x_{u/2} > 0}, s = 3u/4.
  const double u = 1.0, s = 0.75;
  const TimeGrid grid = TimeGrid::over(u, 0.05);
  const std::size_t n = 100000;
  std::vector<double> weighted(n), bridge(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Path p = sample_brownian(grid, 0.0, mix_seed(41, i));
    const double bs = p.values(15);
    weighted[i] = (p.values(10) > 0.0 ? 1.0 : 0.0) * std::sqrt(u / (u - s)) * std::exp(-bs * bs / (2.0 * (u - s)));
    bridge[i] = sample_bridge(u, grid, mix_seed(42, i)).values(10) > 0.0 ? 1.0 : 0.0;
  }
  const double gap = std::abs(mean(weighted) - mean(bridge));
  const double se = std::hypot(std_error(weighted), std_error(bridge));
  EXPECT_LE(gap, 4.0 * se);
}

TEST(Bes3, StartAndMarginal) {
  const TimeGrid grid = TimeGrid::over(1.0, 0.01);
  EXPECT_EQ(sample_bes3(0.0, grid, 1).values(0), 0.0);
  const auto r = column(20000, [&](std::size_t i) { return sample_bes3(0.0, grid, mix_seed(51, i)).end(); });
  EXPECT_TRUE((r.begin() != r.end()) && *std::min_element(r.begin(), r.end()) >= 0.0);
  EXPECT_TRUE(ks_one_sample(r, law_catalog("bes3_marginal", {1.0}).cdf).passed);
}

TEST(Bes3, PitmanMarginal) {
  const TimeGrid grid = TimeGrid::over(1.0, 1e-4);
  const std::size_t n = 3000;
  std::vector<double> pitman(n), r(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Path b = sample_brownian(grid, 0.0, mix_seed(61, i));
    pitman[i] = 2.0 * b.values.maxCoeff() - b.end();
    r[i] = sample_bes3(0.0, TimeGrid::over(1.0, 0.5), mix_seed(62, i)).end();
  }
  EXPECT_TRUE(ks_two_sample(pitman, r, 0.02).passed);
}

TEST(Besq, ZeroIsAbsorbing) {
  const Path z = sample_besq(0.0, 0.0, TimeGrid::over(1.0, 0.01), 4);
  EXPECT_EQ(z.values.abs().maxCoeff(), 0.0);
  EXPECT_THROW(sample_besq(-1.0, 0.0, TimeGrid::over(1.0, 0.01), 4), Error);
  EXPECT_THROW(sample_besq(1.0, -1.0, TimeGrid::over(1.0, 0.01), 4), Error);
}

TEST(Besq, MeanIsLinear) {
  const double delta = 1.5, x0 = 0.7, a = 2.0;
  for (BesqMethod m : {BesqMethod::exact, BesqMethod::euler}) {
    const TimeGrid grid = TimeGrid::over(a, m == BesqMethod::exact ? 0.25 : 1e-3);
    const auto z = column(20000, [&](std::size_t i) { return sample_besq(delta, x0, grid, mix_seed(71, i), m).end(); });
    EXPECT_TRUE(moment_test(z, x0 + delta * a).passed);
    EXPECT_GE(*std::min_element(z.begin(), z.end()), 0.0);
  }
}

TEST(Besq, Additivity) {
  const TimeGrid grid = TimeGrid::over(1.0, 0.5);
  const std::size_t n = 50000;
  std::vector<double> sum(n), two(n);
  for (std::size_t i = 0; i < n; ++i) {
    sum[i] = sample_besq(1.0, 0.0, grid, mix_seed(81, i)).end() + sample_besq(1.0, 0.0, grid, mix_seed(82, i)).end();
    two[i] = sample_besq(2.0, 0.0, grid, mix_seed(83, i)).end();
  }
  EXPECT_TRUE(ks_two_sample(sum, two).passed);
}

TEST(Besq, ExactMatchesFineEuler) {
  const std::size_t n = 20000;
  std::vector<double> exact(n), euler(n);
  for (std::size_t i = 0; i < n; ++i) {
    exact[i] = sample_besq(2.0, 1.0, TimeGrid{1.0, 1}, mix_seed(91, i)).end();
    euler[i] = sample_besq(2.0, 1.0, TimeGrid::over(1.0, 1e-3), mix_seed(92, i), BesqMethod::euler).end();
  }
  EXPECT_LE(ks_two_sample(exact, euler).statistic, 0.02);
}

TEST(Sde, UnitCoefficientsGiveBrownianMotion) {
  const TimeGrid grid = TimeGrid::over(1.0, 0.01);
  const std::size_t n = 10000;
  std::vector<double> sde(n), bm(n);
  for (std::size_t i = 0; i < n; ++i) {
    sde[i] = sample_sde([](double) { return 0.0; }, [](double) { return 1.0; }, 0.0, grid, mix_seed(101, i)).end();
    bm[i] = sample_brownian(grid, 0.0, mix_seed(102, i)).end();
  }
  EXPECT_TRUE(ks_two_sample(sde, bm).passed);
}

TEST(Sde, OrnsteinUhlenbeckVariance) {
  const TimeGrid grid = TimeGrid::over(1.0, 1e-3);
  const auto x2 = column(20000, [&](std::size_t i) {
    const double x = sample_sde([](double v) { return -v; }, [](double) { return 1.0; }, 0.0, grid, mix_seed(111, i)).end();
    return x * x;
  });
  EXPECT_TRUE(moment_test(x2, (1.0 - std::exp(-2.0)) / 2.0, 4.0, 2e-3).passed);
}

TEST(Sde, BangBangMarginal) {
  const double lambda = 1.0;
  const TimeGrid grid = TimeGrid::over(1.0, 1e-3);
  const auto x = column(10000, [&](std::size_t i) {
    return sample_sde([lambda](double v) { return v > 0 ? -lambda : (v < 0 ? lambda : 0.0); },
                      [](double) { return 1.0; }, 0.0, grid, mix_seed(121, i))
        .end();
  });
  EXPECT_TRUE(ks_one_sample(x, law_catalog("bangbang", {lambda, 1.0}).cdf, 0.02).passed);
}

TEST(Sde, NonFiniteCoefficientAborts) {
  EXPECT_THROW(sample_sde([](double) { return NAN; }, [](double) { return 1.0; }, 0.0, TimeGrid{0.1, 3}, 1), Error);
}

TEST(Ou, ExactTransitionVariance) {
  const auto x2 = column(50000, [&](std::size_t i) {
    const double x = sample_ou(1.0, 0.0, TimeGrid{0.5, 2}, mix_seed(131, i)).end();
    return x * x;
  });
  EXPECT_TRUE(moment_test(x2, (1.0 - std::exp(-2.0)) / 2.0).passed);
}

TEST(Spider, OneLegIsReflectedBrownian) {
  const TimeGrid grid = TimeGrid::over(1.0, 1e-3);
  const SpiderPath s = sample_spider(1, grid, 9);
  for (std::size_t k = 0; k < s.branch.size(); ++k) EXPECT_TRUE(s.branch[k] == 0 || s.branch[k] == 1);
  EXPECT_GE(s.radial.values.minCoeff(), 0.0);
  EXPECT_THROW(sample_spider(0, grid, 1), Error);
}

TEST(Spider, LabelsChangeOnlyAtZeros) {
  const TimeGrid grid = TimeGrid::over(1.0, 1e-3);
  const SpiderPath s = sample_spider(4, grid, 17);
  const Path b = sample_brownian(grid, 0.0, 17);
  ASSERT_TRUE((s.radial.values == b.values.abs()).all());
  int seen = 0;
  for (std::size_t k = 1; k < s.branch.size(); ++k) {
    seen |= 1 << s.branch[k];
    if (s.branch[k] == 0 || s.branch[k - 1] == 0 || s.branch[k] == s.branch[k - 1]) continue;
    const auto i = static_cast<Eigen::Index>(k);
    EXPECT_LE(b.values(i - 1) * b.values(i), 0.0) << "leg changed away from a zero at step " << k;
  }
  EXPECT_GT(__builtin_popcount(static_cast<unsigned>(seen) >> 1), 1);
}

TEST(Spider, RadialAndTwoLegMarginals) {
  const TimeGrid grid = TimeGrid::over(1.0, 1e-3);
  const std::size_t n = 10000;
  std::vector<double> radial(n), signed_end(n);
  for (std::size_t i = 0; i < n; ++i) {
    const SpiderPath s = sample_spider(2, grid, mix_seed(141, i));
    radial[i] = s.radial.end();
    signed_end[i] = s.signed_values()(s.radial.values.size() - 1);
  }
  EXPECT_TRUE(ks_one_sample(radial, law_catalog("reflected_sup", {1.0}).cdf).passed);
  EXPECT_TRUE(ks_one_sample(signed_end, law_catalog("normal", {0.0, 1.0}).cdf).passed);
}

TEST(Planar, StartsAtOrigin) {
  const PlanarPath p = sample_planar(TimeGrid::over(1.0, 0.01), 3);
  EXPECT_EQ(p.points.col(0).norm(), 0.0);
  EXPECT_EQ(p.points.cols(), 101);
}

TEST(BridgeHelpers, CrossProbabilityAndMaximum) {
  EXPECT_EQ(bridge_cross_probability(-0.1, 0.1, 0.0, 0.01), 1.0);
  EXPECT_NEAR(bridge_cross_probability(0.1, 0.2, 0.0, 0.01), std::exp(-4.0), 1e-15);
  EXPECT_GE(bridge_max(0.0, 0.3, 0.01, 0.5), 0.3);
  EXPECT_DOUBLE_EQ(bridge_max(0.0, 0.3, 0.01, 1.0), 0.3);
}
