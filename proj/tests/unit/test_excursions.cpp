#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lotex/excursions.hpp"
#include "lotex/localtime.hpp"
#include "lotex/parallel.hpp"
#include "lotex/paths.hpp"
#include "lotex/quadrature.hpp"
#include "lotex/reflaws.hpp"
#include "lotex/rng.hpp"
#include "lotex/stats.hpp"

using namespace lotex;

namespace {

Path from_values(std::initializer_list<double> v, double dt) {
  Path p;
  p.grid = TimeGrid{dt, v.size() - 1};
  p.values = Eigen::Map<const Eigen::ArrayXd>(std::data(v), static_cast<Eigen::Index>(v.size()));
  return p;
}

}  // namespace

TEST(Decompose, SingleSignChange) {
  const Path p = from_values({0.0, 1.0, 2.0, 1.0, -1.0, -2.0}, 1.0);
  DecomposeOptions o;
  o.min_length = 0.1;
  const ExcursionDecomposition d = decompose(p, o);
  ASSERT_EQ(d.excursions.size(), 1u);
  EXPECT_NEAR(d.excursions[0].start, 0.0, 1e-12);
  EXPECT_NEAR(d.excursions[0].end, 3.5, 1e-12);
  EXPECT_EQ(d.excursions[0].sign, 1);
  EXPECT_EQ(d.excursions[0].M, 2.0);
  ASSERT_TRUE(d.boundary.has_value());
  EXPECT_FALSE(d.boundary->complete);
  EXPECT_EQ(d.boundary->sign, -1);
}

TEST(Decompose, PiecesPartitionTheHorizon) {
  const Path p = sample_brownian(TimeGrid::over(1.0, 1e-4), 0.0, 3);
  const ExcursionDecomposition d = decompose(p);
  double total = d.merged_time;
  for (const Excursion& e : d.excursions) {
    EXPECT_GT(e.V, 0.0);
    EXPECT_GT(e.M, 0.0);
    total += e.V;
  }
  if (d.leading) total += d.leading->V;
  if (d.boundary) total += d.boundary->V;
  const double slack = static_cast<double>(d.excursions.size() + 2) * p.grid.step;
  EXPECT_NEAR(total, d.total_time, slack);
  EXPECT_DOUBLE_EQ(d.total_time, 1.0);
  for (std::size_t i = 1; i < d.excursions.size(); ++i) EXPECT_LE(d.excursions[i - 1].end, d.excursions[i].start);
}

TEST(Decompose, SignSymmetry) {
  const TimeGrid grid = TimeGrid::over(4.0, 1e-3);
  const double delta = 0.01;
  double pos = 0.0, neg = 0.0;
  for (std::size_t i = 0; i < 400; ++i) {
    for (const Excursion& e : decompose(sample_brownian(grid, 0.0, mix_seed(4, i))).excursions) {
      if (e.V < delta) continue;
      (e.sign > 0 ? pos : neg) += 1.0;
    }
  }
  EXPECT_LE(std::abs(pos - neg), 4.0 * std::sqrt(pos + neg));
}

TEST(Decompose, NegationFlipsSigns) {
  Path p = sample_brownian(TimeGrid::over(1.0, 1e-3), 0.0, 5);
  const ExcursionDecomposition a = decompose(p);
  p.values = -p.values;
  const ExcursionDecomposition b = decompose(p);
  ASSERT_EQ(a.excursions.size(), b.excursions.size());
  for (std::size_t i = 0; i < a.excursions.size(); ++i) {
    EXPECT_EQ(a.excursions[i].sign, -b.excursions[i].sign);
    EXPECT_DOUBLE_EQ(a.excursions[i].start, b.excursions[i].start);
    EXPECT_DOUBLE_EQ(a.excursions[i].M, b.excursions[i].M);
  }
}

TEST(ItoTails, HeightAndLength) {
  // Run each path to local time 1 at 0 so no excursion is cut off by a horizon.
  const Eigen::ArrayXd v_grid = (Eigen::ArrayXd(2) << 0.01, 0.1).finished();
  const Eigen::ArrayXd a_grid = (Eigen::ArrayXd(3) << 0.1, 0.2, 0.5).finished();
  const auto tallies = parallel_map(1500, [&](std::size_t i) {
    Rng rng(mix_seed(7, i));
    double prev = 0.0, lt = 0.0;
    const ClockedPath p = sample_brownian_scaled_clock(1e-4, 0.05, 0.0, mix_seed(6, i), 50'000'000,
                                                       [&](double, double x, double h) {
                                                         if (!bridge_misses(prev, x, h))
                                                           lt += bridge_local_time(prev, x, h, rng.uniform_pos());
                                                         prev = x;
                                                         return lt >= 1.0;
                                                       });
    DecomposeOptions o;
    o.bridge_max = true;
    o.bridge_zeros = true;
    o.keep_values = false;
    o.seed = mix_seed(8, i);
    return tally_excursions(decompose(p, o), v_grid, a_grid, lt);
  });
  const ItoTailEstimate est = ito_tail_estimates(tallies, v_grid, a_grid);
  for (Eigen::Index j = 0; j < a_grid.size(); ++j)
    EXPECT_NEAR(a_grid(j) * est.height.rate(j), 0.5, 0.03 * 0.5 + 4.0 * a_grid(j) * est.height.se(j));
  for (Eigen::Index j = 0; j < v_grid.size(); ++j)
    EXPECT_NEAR(std::sqrt(M_PI * v_grid(j) / 2.0) * est.length.rate(j), 1.0,
                0.03 + 4.0 * std::sqrt(M_PI * v_grid(j) / 2.0) * est.length.se(j));
}

TEST(ItoTails, SmallExcursionCountApproximatesLocalTime) {
  const double dt = 1e-5, delta = 1e-3;
  const TimeGrid grid = TimeGrid::over(1.0, dt);
  const Eigen::ArrayXd v_grid = Eigen::ArrayXd::Constant(1, delta);
  const Eigen::ArrayXd a_grid = Eigen::ArrayXd::Constant(1, 1.0);
  const auto rows = parallel_map(200, [&](std::size_t i) {
    const Path p = sample_brownian(grid, 0.0, mix_seed(8, i));
    DecomposeOptions o;
    o.keep_values = false;
    o.bridge_zeros = true;
    o.seed = mix_seed(9, i);
    const ExcursionTally t = tally_excursions(decompose(p, o), v_grid, a_grid, 0.0);
    return std::array<double, 2>{std::sqrt(M_PI * delta / 2.0) * t.length_counts(0), centered_local_time(p, 0.0, 1.0, 0.01)};
  });
  std::vector<double> scaled, lt;
  for (const auto& r : rows) {
    scaled.push_back(r[0]);
    lt.push_back(r[1]);
  }
  EXPECT_TRUE(moment_test(scaled, std::sqrt(2.0 / M_PI), 4.0, 0.03).passed) << mean(scaled);
  EXPECT_GT(correlation(scaled, lt), 0.8);
}

TEST(Straddle, ContainsTime) {
  const Path p = from_values({0.0, 1.0, -1.0, -1.0, -1.0, 1.0, 1.0}, 1.0);
  const Straddle s = straddling_excursion(p, 3.0);
  EXPECT_TRUE(s.found_zero);
  EXPECT_NEAR(s.g, 1.5, 1e-12);
  EXPECT_NEAR(s.d, 4.5, 1e-12);
  EXPECT_GE(s.excursion.V, s.d - s.g - 1e-12);
  const Straddle none = straddling_excursion(from_values({1.0, 2.0, 1.0}, 1.0), 1.0);
  EXPECT_FALSE(none.found_zero);
}

TEST(Straddle, EndGivenLastZero) {
  const double dt = 1e-3;
  const TimeGrid grid = TimeGrid::over(1.0, dt);
  const auto gd = parallel_map(20000, [&](std::size_t i) {
    const Path p = sample_brownian(grid, 0.0, mix_seed(10, i));
    DecomposeOptions o;
    o.bridge_zeros = true;
    o.keep_values = false;
    o.seed = mix_seed(11, i);
    Rng rng(mix_seed(12, i));
    const double z = rng.normal();
    return std::array<double, 2>{straddling_excursion(p, 1.0, o).g, 1.0 + p.end() * p.end() / (z * z)};
  });
  std::vector<double> g, y;
  for (const auto& r : gd) g.push_back(r[0]);
  for (double a : {1.5, 2.0, 4.0}) {
    y.clear();
    for (const auto& r : gd) y.push_back(r[1] >= a ? 1.0 : 0.0);
    BinTestOptions opt;
    opt.bins = 5;
    opt.lower = 0.0;
    opt.upper = 1.0;
    EXPECT_TRUE(regression_bin_test(g, y, [a](double x) { return std::sqrt((1.0 - x) / (a - x)); }, opt).passed)
        << "a = " << a;
  }
}

TEST(Straddle, HeightOverLevel) {
  const double c = 1.0, K = 10.0, dt = 2e-3;
  const auto m = parallel_map(1500, [&](std::size_t i) {
    bool above = false;
    int side = 0;
    const StoppedPath sp = sample_brownian_until(dt, 0.0, mix_seed(13, i), 50'000'000, [&](std::size_t, double x) {
      if (!above) {
        if (std::abs(x) >= c) {
          above = true;
          side = x > 0 ? 1 : -1;
        }
        return false;
      }
      return std::abs(x) >= K || side * x <= 0.0;
    });
    double peak = 0.0;
    for (Eigen::Index k = 0; k < sp.path.values.size(); ++k) peak = std::max(peak, std::abs(sp.path.values(k)));
    return std::min(peak, K);
  });
  const Law law = law_catalog("height_over_level", {c});
  EXPECT_TRUE(ks_one_sample(m, [&](double x) { return x >= K ? 1.0 : law.cdf(x); }, 0.02).passed);
}

TEST(Shape, UnitLengthAndIndependence) {
  // Excursions span at least 500 steps so the grid maximum is close to the true one.
  const TimeGrid grid = TimeGrid::over(4.0, 1e-4);
  std::vector<double> height, length;
  for (std::size_t i = 0; i < 400; ++i) {
    for (const Excursion& e : decompose(sample_brownian(grid, 0.0, mix_seed(14, i))).excursions) {
      if (e.V < 0.05) continue;
      const Excursion s = normalized_shape(e);
      EXPECT_DOUBLE_EQ(s.V, 1.0);
      EXPECT_EQ(s.values(0), 0.0);
      EXPECT_EQ(s.values(s.values.size() - 1), 0.0);
      height.push_back(s.M);
      length.push_back(e.V);
    }
  }
  ASSERT_GT(height.size(), 1000u);
  EXPECT_LE(std::abs(correlation(height, length)), 4.0 / std::sqrt(static_cast<double>(height.size())));
  Excursion open;
  open.complete = false;
  open.V = 1.0;
  EXPECT_THROW(normalized_shape(open), Error);
}

TEST(Longest, BoundedByWindow) {
  const Path p = sample_brownian(TimeGrid::over(2.0, 1e-3), 0.0, 15);
  const auto d = longest_excursion(p, Window::g_t, 1.0);
  ASSERT_TRUE(d.has_value());
  EXPECT_LE(*d, path_functionals(p, 1.0).g_t + 1e-12);
}

TEST(Longest, BeforeLastZeroTransform) {
  // E exp(-1 / D_{g_1}) = f(1) / (f(1) + sqrt 2), f(x) = int_x^inf e^-v dv / sqrt(2 pi v^3).
  const double f1 = integrate_to_infinity([](double v) { return std::exp(-v) / std::sqrt(2.0 * M_PI * v * v * v); }, 1.0);
  const double target = f1 / (f1 + std::sqrt(2.0));
  const TimeGrid grid = TimeGrid::over(1.0, 1e-4);
  const auto e = parallel_map(4000, [&](std::size_t i) {
    DecomposeOptions o;
    o.bridge_zeros = true;
    o.keep_values = false;
    o.seed = mix_seed(16, i);
    const auto d = longest_excursion(sample_brownian(grid, 0.0, mix_seed(17, i)), Window::g_t, 1.0, o);
    return d && *d > 0.0 ? std::exp(-1.0 / *d) : 0.0;
  });
  EXPECT_NEAR(mean(e), target, 0.02 + 4.0 * std_error(e));
}
