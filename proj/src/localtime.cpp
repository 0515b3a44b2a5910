#include "lotex/localtime.hpp"

#include <algorithm>

namespace lotex {

namespace {

// Index of the first grid point at or after t, clamped to the path.
std::size_t end_index(PathView path, double t) {
  if (path.size() == 0) return 0;
  return std::min(path.size() - 1, path.count_before(t));
}

// Crossing time of zero between points i and i + 1, or a negative value if none.
double zero_between(PathView path, std::size_t i) {
  const double a = path.values[i];
  const double b = path.values[i + 1];
  if (a == 0.0) return path.time(i);
  if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) return path.time(i) + path.dt(i) * a / (a - b);
  return -1.0;
}

}  // namespace

double occupation_local_time(PathView path, double x, double t, double eps) {
  if (!(eps > 0.0)) throw Error("occupation_local_time: window width must be positive");
  const std::size_t k = end_index(path, t);
  const double hi = x + eps;
  double sum = 0.0;
  if (path.times.empty()) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const double v = path.values[i];
      count += (v >= x && v < hi) ? 1u : 0u;
    }
    sum = static_cast<double>(count) * path.step;
  } else {
    for (std::size_t i = 0; i < k; ++i) {
      const double v = path.values[i];
      if (v >= x && v < hi) sum += path.dt(i);
    }
  }
  return sum / eps;
}

TanakaEstimate tanaka_local_time(PathView path, double x, double t) {
  const std::size_t k = end_index(path, t);
  double integral = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    if (path.values[i] > x) integral += path.values[i + 1] - path.values[i];
  const double raw =
      2.0 * (std::max(path.values[k] - x, 0.0) - std::max(path.values[0] - x, 0.0) - integral);
  return {raw, std::max(raw, 0.0)};
}

std::optional<double> inverse_local_time(PathView path, double l, double eps) {
  if (l < 0.0) throw Error("inverse_local_time: level must be nonnegative");
  if (!(eps > 0.0)) throw Error("inverse_local_time: window width must be positive");
  if (l == 0.0) return 0.0;
  RunningLocalTime lt{0.0, eps, 0.0};
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    lt.advance(path.values[i], path.dt(i));
    if (lt.value > l) return path.time(i + 1);
  }
  return std::nullopt;
}

PathFunctionals path_functionals(PathView path, double t, double eps) {
  if (path.size() < 2) throw Error("path_functionals: path too short");
  if (eps <= 0.0) eps = default_epsilon(path.times.empty() ? path.step : path.dt(0));
  const std::size_t k = end_index(path, t);
  const double tk = path.time(k);
  PathFunctionals f;
  f.S_t = f.I_t = path.values[0];
  double positive = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double v = path.values[i];
    if (v > 0.0) positive += path.dt(i);
    const double z = zero_between(path, i);
    if (z >= 0.0 && z <= tk) f.g_t = z;
    f.S_t = std::max(f.S_t, path.values[i + 1]);
    f.I_t = std::min(f.I_t, path.values[i + 1]);
  }
  if (path.values[k] == 0.0) f.g_t = tk;
  f.A_plus = positive;
  if (path.values[k] == 0.0) {
    f.d_t = tk;
  } else {
    for (std::size_t i = k; i + 1 < path.size(); ++i) {
      const double z = zero_between(path, i);
      if (z >= 0.0) {
        f.d_t = z;
        break;
      }
    }
  }
  f.L0 = centered_local_time(path, 0.0, t, eps);
  return f;
}

LocalTimeCurve local_time_curve(PathView path, const Eigen::ArrayXd& levels, double t, double eps) {
  if (!(eps > 0.0)) throw Error("local_time_curve: window width must be positive");
  LocalTimeCurve curve{levels, Eigen::ArrayXd::Zero(levels.size()), t, eps};
  if (levels.size() == 0) return curve;
  const std::size_t k = end_index(path, t);
  // Levels sorted ascending allow a binary search per point; otherwise fall back.
  const bool sorted = std::is_sorted(levels.data(), levels.data() + levels.size());
  for (std::size_t i = 0; i < k; ++i) {
    const double v = path.values[i];
    const double w = path.dt(i) / eps;
    if (sorted) {
      // levels x with x <= v < x + eps  <=>  v - eps < x <= v
      const double* lo = std::upper_bound(levels.data(), levels.data() + levels.size(), v - eps);
      const double* hi = std::upper_bound(levels.data(), levels.data() + levels.size(), v);
      for (const double* p = lo; p < hi; ++p) curve.values(p - levels.data()) += w;
    } else {
      for (Eigen::Index j = 0; j < levels.size(); ++j)
        if (v >= levels(j) && v < levels(j) + eps) curve.values(j) += w;
    }
  }
  return curve;
}

}  // namespace lotex
