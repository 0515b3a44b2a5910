#include "lotex/paths.hpp"

#include <algorithm>
#include <cmath>

namespace lotex {

namespace {

Eigen::Index len(const TimeGrid& grid) { return static_cast<Eigen::Index>(grid.n_steps + 1); }

}  // namespace

TimeGrid TimeGrid::over(double horizon, double step) {
  if (!(horizon > 0.0) || !(step > 0.0) || !std::isfinite(horizon))
    throw Error("TimeGrid::over: horizon and step must be positive and finite");
  const auto n = static_cast<std::size_t>(std::max(1.0, std::round(horizon / step)));
  return TimeGrid{horizon / static_cast<double>(n), n};
}

std::size_t TimeGrid::index_at(double t) const noexcept {
  if (t <= 0.0) return 0;
  const double k = std::floor(t / step + 1e-9);
  if (k >= static_cast<double>(n_steps)) return n_steps;
  return static_cast<std::size_t>(k);
}

void TimeGrid::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw Error("TimeGrid: step must be positive");
  if (n_steps < 1) throw Error("TimeGrid: n_steps must be at least 1");
  if (!std::isfinite(horizon())) throw Error("TimeGrid: horizon must be finite");
}

std::size_t PathView::count_before(double t) const noexcept {
  if (times.empty()) {
    if (t <= 0.0) return 0;
    const double k = std::ceil(t / step - 1e-9);
    return std::min(values.size(), static_cast<std::size_t>(std::max(0.0, k)));
  }
  return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t) - times.begin());
}

Eigen::ArrayXd SpiderPath::signed_values() const {
  if (legs != 2) throw Error("SpiderPath::signed_values: defined for two legs only");
  Eigen::ArrayXd out = radial.values;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    if (branch[static_cast<std::size_t>(i)] == 2) out(i) = -out(i);
  return out;
}

Path sample_brownian(const TimeGrid& grid, double start, std::uint64_t seed) {
  grid.validate();
  Rng rng(seed);
  Path path{grid, Eigen::ArrayXd(len(grid)), 1, seed};
  const double sqdt = std::sqrt(grid.step);
  double x = start;
  path.values(0) = x;
  for (Eigen::Index i = 1; i < path.values.size(); ++i) {
    x += sqdt * rng.normal();
    path.values(i) = x;
  }
  return path;
}

Path refine_brownian(const Path& coarse, std::uint64_t seed) {
  Rng rng(seed);
  const TimeGrid fine{coarse.grid.step / 2.0, coarse.grid.n_steps * 2};
  Path path{fine, Eigen::ArrayXd(len(fine)), coarse.dim, seed};
  const double sd = std::sqrt(fine.step / 2.0);
  for (Eigen::Index i = 0; i + 1 < coarse.values.size(); ++i) {
    const double a = coarse.values(i);
    const double b = coarse.values(i + 1);
    path.values(2 * i) = a;
    path.values(2 * i + 1) = 0.5 * (a + b) + sd * rng.normal();
  }
  path.values(path.values.size() - 1) = coarse.end();
  return path;
}

Path sample_bridge(double length, const TimeGrid& grid, std::uint64_t seed) {
  grid.validate();
  if (!(length > 0.0) || std::abs(grid.horizon() - length) > 1e-9 * std::max(1.0, length))
    throw Error("sample_bridge: grid horizon must equal the bridge length");
  Path path = sample_brownian(grid, 0.0, seed);
  const double end = path.end();
  const auto n = static_cast<double>(grid.n_steps);
  for (Eigen::Index i = 0; i < path.values.size(); ++i)
    path.values(i) -= end * static_cast<double>(i) / n;
  path.values(path.values.size() - 1) = 0.0;
  return path;
}

Path sample_bes3(double start, const TimeGrid& grid, std::uint64_t seed) {
  grid.validate();
  if (start < 0.0) throw Error("sample_bes3: start must be nonnegative");
  Rng rng(seed);
  Path path{grid, Eigen::ArrayXd(len(grid)), 3, seed};
  const double sqdt = std::sqrt(grid.step);
  double x = start, y = 0.0, z = 0.0;
  path.values(0) = start;
  for (Eigen::Index i = 1; i < path.values.size(); ++i) {
    x += sqdt * rng.normal();
    y += sqdt * rng.normal();
    z += sqdt * rng.normal();
    path.values(i) = std::sqrt(x * x + y * y + z * z);
  }
  return path;
}

Path sample_besq(double delta, double x0, const TimeGrid& grid, std::uint64_t seed, BesqMethod method) {
  grid.validate();
  if (delta < 0.0 || x0 < 0.0) throw Error("sample_besq: dimension and start must be nonnegative");
  Rng rng(seed);
  Path path{grid, Eigen::ArrayXd(len(grid)), 1, seed};
  const double dt = grid.step;
  double z = x0;
  path.values(0) = z;
  for (Eigen::Index i = 1; i < path.values.size(); ++i) {
    if (method == BesqMethod::exact) {
      const double shape = 0.5 * delta + static_cast<double>(rng.poisson(z / (2.0 * dt)));
      z = shape > 0.0 ? 2.0 * dt * rng.gamma(shape) : 0.0;
    } else {
      z += delta * dt + 2.0 * std::sqrt(std::max(z, 0.0) * dt) * rng.normal();
      z = std::max(z, 0.0);
    }
    path.values(i) = z;
  }
  return path;
}

Path sample_ou(double theta, double x0, const TimeGrid& grid, std::uint64_t seed) {
  grid.validate();
  if (theta < 0.0) throw Error("sample_ou: theta must be nonnegative");
  Rng rng(seed);
  Path path{grid, Eigen::ArrayXd(len(grid)), 1, seed};
  const double dt = grid.step;
  const double decay = std::exp(-theta * dt);
  const double sd = theta > 0.0 ? std::sqrt(-std::expm1(-2.0 * theta * dt) / (2.0 * theta)) : std::sqrt(dt);
  double x = x0;
  path.values(0) = x;
  for (Eigen::Index i = 1; i < path.values.size(); ++i) {
    x = decay * x + sd * rng.normal();
    path.values(i) = x;
  }
  return path;
}

SpiderPath sample_spider(int legs, const TimeGrid& grid, std::uint64_t seed) {
  if (legs < 1) throw Error("sample_spider: at least one leg is required");
  Path b = sample_brownian(grid, 0.0, seed);
  Rng labels(mix_seed(seed, 0x5b1de7ULL));
  SpiderPath out;
  out.legs = legs;
  out.radial = reflected(b);
  out.branch.assign(static_cast<std::size_t>(b.values.size()), 0);
  int leg = 0;
  for (Eigen::Index i = 1; i < b.values.size(); ++i) {
    const double prev = b.values(i - 1);
    const double cur = b.values(i);
    if (leg == 0 || prev == 0.0 || (prev > 0.0) != (cur > 0.0))
      leg = 1 + static_cast<int>(labels.uniform() * legs);
    out.branch[static_cast<std::size_t>(i)] = cur == 0.0 ? 0 : leg;
  }
  return out;
}

PlanarPath sample_planar(const TimeGrid& grid, std::uint64_t seed) {
  grid.validate();
  Rng rng(seed);
  PlanarPath out{grid, Eigen::Matrix2Xd(2, len(grid)), seed};
  const double sqdt = std::sqrt(grid.step);
  out.points.col(0).setZero();
  for (Eigen::Index i = 1; i < out.points.cols(); ++i) {
    out.points(0, i) = out.points(0, i - 1) + sqdt * rng.normal();
    out.points(1, i) = out.points(1, i - 1) + sqdt * rng.normal();
  }
  return out;
}

Path reflected(const Path& path) {
  Path out = path;
  out.values = path.values.abs();
  return out;
}

Path folded(const Path& path, double half_width) {
  if (!(half_width > 0.0)) throw Error("folded: half width must be positive");
  Path out = path;
  const double period = 4.0 * half_width;
  out.values = path.values.unaryExpr([&](double x) {
    double r = std::fmod(x + half_width, period);
    if (r < 0.0) r += period;
    return r <= 2.0 * half_width ? r - half_width : 3.0 * half_width - r;
  });
  return out;
}

}  // namespace lotex
