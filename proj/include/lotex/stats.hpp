// Goodness-of-fit and moment tests shared by every experiment.

#ifndef LOTEX_STATS_HPP
#define LOTEX_STATS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace lotex {

using DetailValue = std::variant<double, std::string>;

struct TestReport {
  std::string experiment;
  double statistic = 0.0;
  std::optional<double> p_value;
  bool passed = false;
  std::size_t n_paths = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
  std::int64_t runtime_ms = 0;
  std::map<std::string, DetailValue> details;
};

inline constexpr double kAlpha = 1e-3;

/// Asymptotic Kolmogorov survival function P(K > lambda).
double kolmogorov_sf(double lambda);

/// Two-sample KS with right-continuous empirical CDFs. The p-value is taken
/// at max(D - bias_tolerance, 0) with effective size nm/(n+m).
TestReport ks_two_sample(std::span<const double> a, std::span<const double> b, double bias_tolerance = 0.0,
                         double alpha = kAlpha);

TestReport ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf,
                         double bias_tolerance = 0.0, double alpha = kAlpha);

/// |mean - target| <= se_mult * SE + allowance.
TestReport moment_test(std::span<const double> sample, double target, double se_mult = 4.0,
                       double allowance = 0.0);

/// At each lambda, the mean of exp(-lambda X) against transform(lambda). The
/// per-point multiplier is se_mult raised to the Bonferroni level for the grid.
/// Infinite sample values contribute exp(-inf) = 0.
TestReport laplace_grid_test(std::span<const double> sample, const std::function<double(double)>& transform,
                             std::span<const double> lambdas, double se_mult = 4.0, double allowance = 0.0);

/// Variance-to-mean ratio of counts inside [lo, hi].
TestReport dispersion_test(std::span<const double> counts, double lo = 0.9, double hi = 1.1);

struct BinTestOptions {
  int bins = 10;
  double se_mult = 4.0;
  std::optional<double> max_error;  ///< optional absolute cap on every bin error
  std::optional<double> lower;      ///< bin range; data range when absent
  std::optional<double> upper;
  std::size_t min_count = 20;       ///< bins with fewer members are skipped
};

/// Bins x and compares the mean of y in each bin against the mean of model(x)
/// over the bin's members, within se_mult binomial standard errors
/// (Bonferroni over bins) and the optional absolute cap.
TestReport regression_bin_test(std::span<const double> x, std::span<const double> y,
                               const std::function<double(double)>& model, const BinTestOptions& options = {});

/// max over edges of |F_n(edge) - cdf(edge)| <= max_error.
TestReport cdf_bin_test(std::span<const double> sample, const std::function<double(double)>& cdf,
                        std::span<const double> edges, double max_error);

/// |corr(x, y)| <= mult / sqrt(N).
TestReport correlation_test(std::span<const double> x, std::span<const double> y, double mult = 4.0);

double mean(std::span<const double> x);
double variance(std::span<const double> x);
double std_error(std::span<const double> x);
double correlation(std::span<const double> x, std::span<const double> y);

/// Two-sided normal multiplier after Bonferroni correction of `se_mult` over m tests.
double bonferroni_multiplier(double se_mult, std::size_t m);

}  // namespace lotex

#endif  // LOTEX_STATS_HPP
