#include "lotex/intersect2d.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "lotex/parallel.hpp"
#include "lotex/quadrature.hpp"
#include "lotex/rng.hpp"
#include "lotex/stats.hpp"

namespace lotex {

namespace {

std::int64_t cell_key(std::int64_t cx, std::int64_t cy) { return (cx << 32) ^ (cy & 0xffffffff); }

}  // namespace

double tent_mollifier(const Eigen::Vector2d& x) {
  return std::max(0.0, 1.0 - std::abs(x(0))) * std::max(0.0, 1.0 - std::abs(x(1)));
}

double intersection_estimate(const PlanarPath& path, const Eigen::Vector2d& y, double n, double t) {
  if (!(n >= 1.0)) throw Error("intersection_estimate: mollifier scale must be >= 1");
  const Eigen::Index cols = path.points.cols();
  Eigen::Index last = cols - 1;
  if (t > 0.0) last = std::min<Eigen::Index>(last, static_cast<Eigen::Index>(std::floor(t / path.grid.step + 1e-9)));
  if (last < 1) return 0.0;
  const double width = 1.0 / n;
  auto cell = [&](double v) { return static_cast<std::int64_t>(std::floor(v / width)); };
  // Product trapezoid weights on the time square.
  auto weight = [&](Eigen::Index i) { return i == 0 || i == last ? 0.5 : 1.0; };

  std::unordered_map<std::int64_t, std::vector<Eigen::Index>> cells;
  double sum = 0.0;
  for (Eigen::Index j = 0; j <= last; ++j) {
    const Eigen::Vector2d target = path.points.col(j) - y;
    const std::int64_t cx = cell(target(0)), cy = cell(target(1));
    double inner = 0.0;
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = cells.find(cell_key(cx + dx, cy + dy));
        if (it == cells.end()) continue;
        for (Eigen::Index i : it->second)
          inner += weight(i) * tent_mollifier(n * (target - path.points.col(i)));
      }
    sum += weight(j) * inner;
    cells[cell_key(cell(path.points(0, j)), cell(path.points(1, j)))].push_back(j);
  }
  return sum * n * n * path.grid.step * path.grid.step;
}

double expected_alpha(const Eigen::Vector2d& y, double t) {
  if (!(t > 0.0)) return 0.0;
  const double r2 = y.squaredNorm();
  if (r2 == 0.0) return INFINITY;
  return integrate([&](double u) { return u <= 0.0 ? 0.0 : (t - u) * std::exp(-r2 / (2.0 * u)) / (2.0 * M_PI * u); },
                   0.0, t, 1e-12);
}

IntersectionSample intersection_sample(const Eigen::Vector2d& y, double n, double t, std::size_t steps,
                                       std::size_t n_paths, std::uint64_t seed) {
  if (steps < 1 || n_paths < 2) throw Error("intersection_sample: need steps >= 1 and n_paths >= 2");
  const TimeGrid grid = TimeGrid::over(t, t / static_cast<double>(steps));
  IntersectionSample out;
  out.values = parallel_map(n_paths, [&](std::size_t i) {
    return intersection_estimate(sample_planar(grid, mix_seed(seed, i)), y, n);
  });
  out.mean = mean(out.values);
  out.se = std_error(out.values);
  return out;
}

}  // namespace lotex
