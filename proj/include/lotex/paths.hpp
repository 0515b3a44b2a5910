// Seed-reproducible samplers for the processes the library studies:
// Brownian motion and bridge, Bessel(3), squared Bessel, Euler-Maruyama
// diffusions, Ornstein-Uhlenbeck, the Walsh spider and planar Brownian motion.
//
// Every sampler is a pure function of its arguments; equal inputs give
// bit-identical paths on any thread.

#ifndef LOTEX_PATHS_HPP
#define LOTEX_PATHS_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "lotex/rng.hpp"

namespace lotex {

/// Raised on violated preconditions anywhere in the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform time discretization t_i = i * step, i = 0..n_steps.
struct TimeGrid {
  double step = 1e-4;
  std::size_t n_steps = 1;

  /// Grid of the given horizon; the step is adjusted so the horizon is hit exactly.
  static TimeGrid over(double horizon, double step);

  double horizon() const noexcept { return step * static_cast<double>(n_steps); }
  double time(std::size_t i) const noexcept { return step * static_cast<double>(i); }
  /// Index of the last grid point with time <= t (clamped to the grid).
  std::size_t index_at(double t) const noexcept;
  void validate() const;
};

/// Read-only view over a sampled trajectory. Times are uniform (`step`)
/// when `times` is empty, explicit otherwise.
struct PathView {
  std::span<const double> values;
  double step = 0.0;
  std::span<const double> times;

  std::size_t size() const noexcept { return values.size(); }
  double time(std::size_t i) const noexcept {
    return times.empty() ? step * static_cast<double>(i) : times[i];
  }
  /// Length of the step leaving point i.
  double dt(std::size_t i) const noexcept {
    return times.empty() ? step : times[i + 1] - times[i];
  }
  double horizon() const noexcept { return values.empty() ? 0.0 : time(values.size() - 1); }
  /// Number of leading points whose time is strictly before t.
  std::size_t count_before(double t) const noexcept;
};

/// A trajectory on a uniform grid.
struct Path {
  TimeGrid grid;
  Eigen::ArrayXd values;
  int dim = 1;
  std::uint64_t seed = 0;

  double start() const { return values(0); }
  double end() const { return values(values.size() - 1); }
  PathView view() const noexcept {
    return {std::span<const double>(values.data(), static_cast<std::size_t>(values.size())), grid.step, {}};
  }
  operator PathView() const noexcept { return view(); }
};

/// A trajectory sampled on a state-dependent clock.
struct ClockedPath {
  std::vector<double> times;
  std::vector<double> values;
  std::uint64_t seed = 0;
  bool capped = false;

  PathView view() const noexcept { return {values, 0.0, times}; }
  operator PathView() const noexcept { return view(); }
  double horizon() const noexcept { return times.empty() ? 0.0 : times.back(); }
};

/// Walsh spider: a reflected radial part plus the leg of every excursion.
struct SpiderPath {
  Path radial;
  std::vector<int> branch;  ///< leg in [1, legs] at each grid point; 0 where radial is 0
  int legs = 1;

  /// For two legs: leg 1 mapped to the positive half-line, leg 2 to the negative one.
  Eigen::ArrayXd signed_values() const;
};

/// Planar trajectory, one column per grid point.
struct PlanarPath {
  TimeGrid grid;
  Eigen::Matrix2Xd points;
  std::uint64_t seed = 0;
};

enum class BesqMethod { euler, exact };

Path sample_brownian(const TimeGrid& grid, double start, std::uint64_t seed);

/// Inserts Brownian-bridge midpoints, halving the step. Coarse points are kept.
Path refine_brownian(const Path& coarse, std::uint64_t seed);

/// Brownian bridge of the given length from 0 to 0; the grid horizon must equal `length`.
Path sample_bridge(double length, const TimeGrid& grid, std::uint64_t seed);

/// Bessel(3) as the Euclidean norm of a 3-d Brownian motion started at (start, 0, 0).
Path sample_bes3(double start, const TimeGrid& grid, std::uint64_t seed);

/// Squared Bessel process of dimension `delta` from `x0`. Exact mode draws each
/// transition from the Poisson mixture of gamma laws; Euler mode clamps the
/// square-root argument at zero.
Path sample_besq(double delta, double x0, const TimeGrid& grid, std::uint64_t seed,
                 BesqMethod method = BesqMethod::exact);

/// Exact Ornstein-Uhlenbeck transitions for dX = -theta X dt + dB.
Path sample_ou(double theta, double x0, const TimeGrid& grid, std::uint64_t seed);

SpiderPath sample_spider(int legs, const TimeGrid& grid, std::uint64_t seed);

PlanarPath sample_planar(const TimeGrid& grid, std::uint64_t seed);

/// |X|, i.e. the path reflected at zero.
Path reflected(const Path& path);

/// Folds the path into [-half_width, half_width] with reflection at both ends.
/// Applied to Brownian motion this gives Brownian motion reflected at the band
/// edges, whose occupation of levels inside the band matches the free path up
/// to a time change.
Path folded(const Path& path, double half_width);

/// Euler-Maruyama: X_{i+1} = X_i + b(X_i) dt + sigma(X_i) sqrt(dt) N_i.
template <class Drift, class Sigma>
Path sample_sde(Drift&& drift, Sigma&& sigma, double x0, const TimeGrid& grid, std::uint64_t seed) {
  grid.validate();
  Rng rng(seed);
  Path path{grid, Eigen::ArrayXd(static_cast<Eigen::Index>(grid.n_steps + 1)), 1, seed};
  const double dt = grid.step;
  const double sqdt = std::sqrt(dt);
  double x = x0;
  path.values(0) = x;
  for (std::size_t i = 0; i < grid.n_steps; ++i) {
    const double b = drift(x);
    const double s = sigma(x);
    if (!std::isfinite(b) || !std::isfinite(s)) {
      std::ostringstream msg;
      msg << "sample_sde: non-finite coefficient at step " << i << ", x = " << x
          << " (drift " << b << ", sigma " << s << ")";
      throw Error(msg.str());
    }
    x += b * dt + s * sqdt * rng.normal();
    path.values(static_cast<Eigen::Index>(i + 1)) = x;
  }
  return path;
}

/// Brownian motion run until `stop(index, value)` returns true or `max_steps`
/// steps were taken. The returned grid covers the steps actually taken.
struct StoppedPath {
  Path path;
  bool stopped = false;
};

template <class Stop>
StoppedPath sample_brownian_until(double step, double start, std::uint64_t seed,
                                  std::size_t max_steps, Stop&& stop) {
  if (!(step > 0.0)) throw Error("sample_brownian_until: step must be positive");
  Rng rng(seed);
  const double sqdt = std::sqrt(step);
  std::vector<double> values;
  values.reserve(std::min<std::size_t>(max_steps + 1, 1u << 16));
  double x = start;
  values.push_back(x);
  bool stopped = stop(std::size_t{0}, x);
  while (!stopped && values.size() <= max_steps) {
    x += sqdt * rng.normal();
    values.push_back(x);
    stopped = stop(values.size() - 1, x);
  }
  StoppedPath out;
  out.stopped = stopped;
  out.path.grid = TimeGrid{step, values.size() - 1};
  out.path.values = Eigen::Map<const Eigen::ArrayXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  out.path.seed = seed;
  return out;
}

/// Brownian motion on the level-scaled clock dt(x) = base_step * max(1, |x|/scale)^2.
/// Increments are exact Gaussians of the current step's variance, so grid values
/// are Brownian motion observed at a sequence of stopping times. `stop(t, x, dt)`
/// is called after every step with the step just taken.
template <class Stop>
ClockedPath sample_brownian_scaled_clock(double base_step, double scale, double start,
                                         std::uint64_t seed, std::size_t max_steps, Stop&& stop) {
  if (!(base_step > 0.0) || !(scale > 0.0)) throw Error("sample_brownian_scaled_clock: bad clock");
  Rng rng(seed);
  ClockedPath out;
  out.seed = seed;
  double t = 0.0;
  double x = start;
  out.times.push_back(t);
  out.values.push_back(x);
  for (std::size_t i = 0; i < max_steps; ++i) {
    const double r = std::max(1.0, std::abs(x) / scale);
    const double dt = base_step * r * r;
    t += dt;
    x += std::sqrt(dt) * rng.normal();
    out.times.push_back(t);
    out.values.push_back(x);
    if (stop(t, x, dt)) return out;
  }
  out.capped = true;
  return out;
}

/// Maximum of a Brownian bridge from a to b over a step of length dt, given a
/// uniform variate u in (0, 1].
inline double bridge_max(double a, double b, double dt, double u) {
  const double d = b - a;
  return 0.5 * (a + b + std::sqrt(d * d - 2.0 * dt * std::log(u)));
}

/// Probability that a Brownian bridge from a to b over dt touches `level`.
inline double bridge_cross_probability(double a, double b, double level, double dt) {
  const double p = (a - level) * (b - level);
  if (p <= 0.0) return 1.0;
  return std::exp(-2.0 * p / dt);
}

}  // namespace lotex

#endif  // LOTEX_PATHS_HPP
