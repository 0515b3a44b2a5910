#include "lotex/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lotex/paths.hpp"
#include "lotex/quadrature.hpp"

namespace lotex {

namespace {

std::vector<double> sorted_copy(std::span<const double> x) {
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  return v;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

}  // namespace

double mean(std::span<const double> x) {
  if (x.empty()) throw Error("mean: empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw Error("variance: need at least two values");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double std_error(std::span<const double> x) { return std::sqrt(variance(x) / static_cast<double>(x.size())); }

double correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("correlation: samples must have equal length >= 2");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double bonferroni_multiplier(double se_mult, std::size_t m) {
  if (m <= 1) return se_mult;
  const double tail = std::erfc(se_mult / std::sqrt(2.0)) / static_cast<double>(m);
  return normal_quantile(1.0 - 0.5 * tail);
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Dual (theta-function) series, accurate for small lambda.
    const double c = M_PI * M_PI / (8.0 * lambda * lambda);
    double s = 0.0;
    for (int k = 1; k <= 6; ++k) s += std::exp(-static_cast<double>((2 * k - 1) * (2 * k - 1)) * c);
    return std::clamp(1.0 - std::sqrt(2.0 * M_PI) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

TestReport ks_two_sample(std::span<const double> a, std::span<const double> b, double bias_tolerance,
                         double alpha) {
  if (a.size() < 50 || b.size() < 50) throw Error("ks_two_sample: each sample needs at least 50 values");
  const std::vector<double> x = sorted_copy(a);
  const std::vector<double> y = sorted_copy(b);
  const auto n = static_cast<double>(x.size());
  const auto m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() || j < y.size()) {
    const double v = (j >= y.size() || (i < x.size() && x[i] <= y[j])) ? x[i] : y[j];
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  const double ne = n * m / (n + m);
  TestReport r;
  r.statistic = d;
  r.p_value = kolmogorov_sf(std::sqrt(ne) * std::max(d - bias_tolerance, 0.0));
  r.passed = *r.p_value > alpha;
  r.details["n"] = n;
  r.details["m"] = m;
  r.details["bias_tolerance"] = bias_tolerance;
  return r;
}

TestReport ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf,
                         double bias_tolerance, double alpha) {
  if (sample.size() < 50) throw Error("ks_one_sample: sample needs at least 50 values");
  const std::vector<double> x = sorted_copy(sample);
  const auto n = static_cast<double>(x.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < x.size()) {
    std::size_t k = i;
    while (k < x.size() && x[k] == x[i]) ++k;
    const double f = cdf(x[i]);
    const double f_left = cdf(std::nextafter(x[i], -INFINITY));
    d = std::max({d, static_cast<double>(k) / n - f, f_left - static_cast<double>(i) / n});
    i = k;
  }
  TestReport r;
  r.statistic = d;
  r.p_value = kolmogorov_sf(std::sqrt(n) * std::max(d - bias_tolerance, 0.0));
  r.passed = *r.p_value > alpha;
  r.details["n"] = n;
  r.details["bias_tolerance"] = bias_tolerance;
  return r;
}

TestReport moment_test(std::span<const double> sample, double target, double se_mult, double allowance) {
  if (sample.size() < 2) throw Error("moment_test: need at least two values");
  const double m = mean(sample);
  const double se = std_error(sample);
  const double gap = std::abs(m - target);
  TestReport r;
  r.statistic = se > 0.0 ? (m - target) / se : (gap == 0.0 ? 0.0 : std::copysign(INFINITY, m - target));
  r.p_value = se > 0.0 ? std::erfc(std::abs(r.statistic) / std::sqrt(2.0)) : (gap == 0.0 ? 1.0 : 0.0);
  r.passed = gap <= se_mult * se + allowance;
  r.details["mean"] = m;
  r.details["target"] = target;
  r.details["se"] = se;
  r.details["allowance"] = allowance;
  return r;
}

TestReport laplace_grid_test(std::span<const double> sample, const std::function<double(double)>& transform,
                             std::span<const double> lambdas, double se_mult, double allowance) {
  if (sample.size() < 2) throw Error("laplace_grid_test: need at least two values");
  if (lambdas.empty()) throw Error("laplace_grid_test: empty lambda grid");
  const double q = bonferroni_multiplier(se_mult, lambdas.size());
  TestReport r;
  r.passed = true;
  double worst = 0.0;
  std::vector<double> w(sample.size());
  for (double lambda : lambdas) {
    for (std::size_t i = 0; i < sample.size(); ++i) w[i] = std::exp(-lambda * sample[i]);
    const double m = mean(w);
    const double se = std_error(w);
    const double target = transform(lambda);
    const double gap = std::abs(m - target);
    const double z = se > 0.0 ? (m - target) / se : 0.0;
    const bool ok = gap <= q * se + allowance;
    r.passed = r.passed && ok;
    worst = std::max(worst, std::abs(z));
    const std::string key = "lambda=" + fmt(lambda);
    r.details[key + " empirical"] = m;
    r.details[key + " target"] = target;
    r.details[key + " z"] = z;
  }
  r.statistic = worst;
  r.p_value = std::min(1.0, static_cast<double>(lambdas.size()) * std::erfc(worst / std::sqrt(2.0)));
  r.details["multiplier"] = q;
  r.details["allowance"] = allowance;
  return r;
}

TestReport dispersion_test(std::span<const double> counts, double lo, double hi) {
  if (counts.size() < 2) throw Error("dispersion_test: need at least two counts");
  const double m = mean(counts);
  if (!(m > 0.0)) throw Error("dispersion_test: mean count must be positive");
  const double ratio = variance(counts) / m;
  TestReport r;
  r.statistic = ratio;
  r.passed = ratio >= lo && ratio <= hi;
  r.details["mean"] = m;
  r.details["lo"] = lo;
  r.details["hi"] = hi;
  return r;
}

TestReport regression_bin_test(std::span<const double> x, std::span<const double> y,
                               const std::function<double(double)>& model, const BinTestOptions& options) {
  if (x.size() != y.size() || x.empty()) throw Error("regression_bin_test: x and y must have equal nonzero length");
  if (options.bins < 1) throw Error("regression_bin_test: need at least one bin");
  const double lo = options.lower.value_or(*std::min_element(x.begin(), x.end()));
  double hi = options.upper.value_or(*std::max_element(x.begin(), x.end()));
  if (!(hi > lo)) hi = lo + 1.0;
  const auto bins = static_cast<std::size_t>(options.bins);
  std::vector<double> count(bins, 0.0), sum_y(bins, 0.0), sum_m(bins, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo || x[i] > hi) continue;
    auto b = static_cast<std::size_t>((x[i] - lo) / (hi - lo) * static_cast<double>(bins));
    b = std::min(b, bins - 1);
    count[b] += 1.0;
    sum_y[b] += y[i];
    sum_m[b] += model(x[i]);
  }
  std::size_t used = 0;
  for (double c : count) used += c >= static_cast<double>(options.min_count) ? 1 : 0;
  const double q = bonferroni_multiplier(options.se_mult, std::max<std::size_t>(used, 1));
  TestReport r;
  r.passed = used > 0;
  double worst_error = 0.0, worst_z = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    if (count[b] < static_cast<double>(options.min_count)) continue;
    const double ybar = sum_y[b] / count[b];
    const double mbar = sum_m[b] / count[b];
    const double se = std::sqrt(std::max(mbar * (1.0 - mbar), 1e-12) / count[b]);
    const double err = std::abs(ybar - mbar);
    const bool ok = err <= q * se && (!options.max_error || err <= *options.max_error);
    r.passed = r.passed && ok;
    worst_error = std::max(worst_error, err);
    worst_z = std::max(worst_z, err / se);
    r.details["bin " + std::to_string(b) + " observed"] = ybar;
    r.details["bin " + std::to_string(b) + " model"] = mbar;
  }
  r.statistic = worst_error;
  r.details["max_z"] = worst_z;
  r.details["multiplier"] = q;
  r.details["bins_used"] = static_cast<double>(used);
  return r;
}

TestReport cdf_bin_test(std::span<const double> sample, const std::function<double(double)>& cdf,
                        std::span<const double> edges, double max_error) {
  if (sample.empty()) throw Error("cdf_bin_test: empty sample");
  const std::vector<double> x = sorted_copy(sample);
  const auto n = static_cast<double>(x.size());
  double worst = 0.0;
  for (double e : edges) {
    const auto k = static_cast<double>(std::upper_bound(x.begin(), x.end(), e) - x.begin());
    worst = std::max(worst, std::abs(k / n - cdf(e)));
  }
  TestReport r;
  r.statistic = worst;
  r.passed = worst <= max_error;
  r.details["max_error"] = max_error;
  return r;
}

TestReport correlation_test(std::span<const double> x, std::span<const double> y, double mult) {
  const double c = correlation(x, y);
  const double bound = mult / std::sqrt(static_cast<double>(x.size()));
  TestReport r;
  r.statistic = c;
  r.passed = std::abs(c) <= bound;
  r.details["bound"] = bound;
  return r;
}

}  // namespace lotex
