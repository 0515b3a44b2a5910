#include "lotex/excursions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lotex/localtime.hpp"

namespace lotex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Zero {
  double t;
  std::ptrdiff_t last_before;  // last grid index strictly before t
  std::size_t first_after;     // first grid index strictly after t
};

std::vector<Zero> find_zeros(PathView path, const DecomposeOptions& opt, Rng& rng) {
  std::vector<Zero> zeros;
  const std::size_t n = path.size();
  const auto& v = path.values;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = v[i];
    const double b = v[i + 1];
    const auto ii = static_cast<std::ptrdiff_t>(i);
    if (a == 0.0) {
      zeros.push_back({path.time(i), ii - 1, i + 1});
    } else if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
      zeros.push_back({path.time(i) + path.dt(i) * a / (a - b), ii, i + 1});
    } else if (opt.bridge_zeros && b != 0.0) {
      const double dt = path.dt(i);
      if (rng.uniform() < std::exp(-2.0 * a * b / dt))
        zeros.push_back({path.time(i) + dt * a / (a + b), ii, i + 1});
    }
  }
  if (n > 0 && v[n - 1] == 0.0)
    zeros.push_back({path.time(n - 1), static_cast<std::ptrdiff_t>(n) - 2, n});
  return zeros;
}

// Builds the piece between zero-or-edge times t0 and t1 whose interior grid
// points are [lo, hi]. `open_start` / `open_end` mark edges that are not zeros.
Excursion build_piece(PathView path, double t0, double t1, std::ptrdiff_t lo, std::ptrdiff_t hi,
                      bool open_start, bool open_end, const DecomposeOptions& opt, Rng& rng) {
  Excursion e;
  e.start = t0;
  e.end = t1;
  e.V = t1 - t0;
  e.complete = !open_start && !open_end;
  const auto& v = path.values;
  const bool has_interior = lo <= hi;
  e.sign = has_interior && v[static_cast<std::size_t>(lo)] < 0.0 ? -1 : 1;
  double m = 0.0;
  std::ptrdiff_t arg = -1;
  for (std::ptrdiff_t j = lo; j <= hi; ++j) {
    const double a = std::abs(v[static_cast<std::size_t>(j)]);
    if (a > m) {
      m = a;
      arg = j;
    }
  }
  e.peak_time = arg >= 0 ? path.time(static_cast<std::size_t>(arg)) - t0 : 0.0;
  if (opt.bridge_max && has_interior) {
    double best = m;
    auto consider = [&](double a, double b, double dt, double at) {
      if (dt <= 0.0) return;
      if (std::max(a, b) + 4.0 * std::sqrt(dt) < m) return;
      const double top = bridge_max(a, b, dt, rng.uniform_pos());
      if (top > best) {
        best = top;
        e.peak_time = at - t0;
      }
    };
    const auto first = static_cast<std::size_t>(lo);
    const auto last = static_cast<std::size_t>(hi);
    if (!open_start) consider(0.0, std::abs(v[first]), path.time(first) - t0, path.time(first));
    for (std::size_t j = first; j < last; ++j)
      consider(std::abs(v[j]), std::abs(v[j + 1]), path.dt(j), path.time(j));
    if (!open_end) consider(std::abs(v[last]), 0.0, t1 - path.time(last), path.time(last));
    m = best;
  }
  e.M = m;
  if (opt.keep_values) {
    const std::ptrdiff_t count = std::max<std::ptrdiff_t>(0, hi - lo + 1);
    const Eigen::Index len = count + (open_start ? 0 : 1) + (open_end ? 0 : 1);
    e.times.resize(len);
    e.values.resize(len);
    Eigen::Index k = 0;
    if (!open_start) {
      e.times(k) = 0.0;
      e.values(k++) = 0.0;
    }
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      e.times(k) = path.time(static_cast<std::size_t>(j)) - t0;
      e.values(k++) = v[static_cast<std::size_t>(j)];
    }
    if (!open_end) {
      e.times(k) = e.V;
      e.values(k++) = 0.0;
    }
  }
  return e;
}

}  // namespace

ExcursionDecomposition decompose(PathView path, const DecomposeOptions& opt) {
  ExcursionDecomposition dec;
  const std::size_t n = path.size();
  if (n < 2) throw Error("decompose: path too short");
  dec.total_time = path.horizon();
  Rng rng(mix_seed(opt.seed, 0xe3c0ULL));
  const std::vector<Zero> zeros = find_zeros(path, opt, rng);
  const auto last_index = static_cast<std::ptrdiff_t>(n) - 1;

  if (zeros.empty()) {
    dec.leading = build_piece(path, 0.0, dec.total_time, 0, last_index, true, true, opt, rng);
    return dec;
  }
  if (zeros.front().t > 0.0)
    dec.leading = build_piece(path, 0.0, zeros.front().t, 0, zeros.front().last_before, true, false, opt, rng);

  for (std::size_t k = 0; k + 1 < zeros.size(); ++k) {
    const Zero& a = zeros[k];
    const Zero& b = zeros[k + 1];
    const double length = b.t - a.t;
    double min_length = opt.min_length;
    if (min_length <= 0.0) min_length = 2.0 * path.dt(std::min(a.first_after, n - 1) - (a.first_after > 0 ? 1 : 0));
    if (length < min_length) {
      dec.merged_time += length;
      continue;
    }
    dec.excursions.push_back(build_piece(path, a.t, b.t, static_cast<std::ptrdiff_t>(a.first_after),
                                         b.last_before, false, false, opt, rng));
  }

  const Zero& z = zeros.back();
  if (z.t < dec.total_time)
    dec.boundary = build_piece(path, z.t, dec.total_time, static_cast<std::ptrdiff_t>(z.first_after), last_index,
                               false, true, opt, rng);
  return dec;
}

ExcursionTally tally_excursions(const ExcursionDecomposition& dec, const Eigen::ArrayXd& v_grid,
                                const Eigen::ArrayXd& a_grid, double local_time) {
  ExcursionTally t{Eigen::ArrayXd::Zero(v_grid.size()), Eigen::ArrayXd::Zero(a_grid.size()), local_time};
  for (const Excursion& e : dec.excursions) {
    for (Eigen::Index j = 0; j < v_grid.size(); ++j)
      if (e.V >= v_grid(j)) t.length_counts(j) += 1.0;
    if (e.sign > 0)
      for (Eigen::Index j = 0; j < a_grid.size(); ++j)
        if (e.M >= a_grid(j)) t.height_counts(j) += 1.0;
  }
  return t;
}

namespace {

TailTable ratio_table(std::span<const ExcursionTally> tallies, const Eigen::ArrayXd& grid, bool lengths,
                      double mean_l) {
  const auto n = static_cast<double>(tallies.size());
  TailTable table{grid, Eigen::ArrayXd::Zero(grid.size()), Eigen::ArrayXd::Zero(grid.size())};
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    double sum = 0.0;
    for (const auto& t : tallies) sum += lengths ? t.length_counts(j) : t.height_counts(j);
    const double rate = sum / n / mean_l;
    double var = 0.0;
    for (const auto& t : tallies) {
      const double c = lengths ? t.length_counts(j) : t.height_counts(j);
      const double r = c - rate * t.local_time;
      var += r * r;
    }
    var /= std::max(1.0, n - 1.0);
    table.rate(j) = rate;
    table.se(j) = std::sqrt(var / n) / mean_l;
  }
  return table;
}

}  // namespace

ItoTailEstimate ito_tail_estimates(std::span<const ExcursionTally> tallies, const Eigen::ArrayXd& v_grid,
                                   const Eigen::ArrayXd& a_grid, double min_mean_local_time) {
  if (tallies.empty()) throw Error("ito_tail_estimates: no paths");
  ItoTailEstimate out;
  out.n_paths = tallies.size();
  double sum_l = 0.0;
  for (const auto& t : tallies) sum_l += t.local_time;
  out.mean_local_time = sum_l / static_cast<double>(tallies.size());
  if (!(out.mean_local_time > min_mean_local_time))
    throw Error("ito_tail_estimates: mean local time below floor; paths too short");
  out.length = ratio_table(tallies, v_grid, true, out.mean_local_time);
  out.height = ratio_table(tallies, a_grid, false, out.mean_local_time);
  return out;
}

ItoTailEstimate ito_tail_estimates(const std::vector<Path>& paths, const Eigen::ArrayXd& v_grid,
                                   const Eigen::ArrayXd& a_grid, double eps, const DecomposeOptions& options) {
  std::vector<ExcursionTally> tallies;
  tallies.reserve(paths.size());
  DecomposeOptions opt = options;
  opt.keep_values = false;
  for (const Path& p : paths) {
    opt.seed = mix_seed(options.seed, p.seed);
    const double l = centered_local_time(p, 0.0, p.grid.horizon(), eps);
    tallies.push_back(tally_excursions(decompose(p, opt), v_grid, a_grid, l));
  }
  return ito_tail_estimates(tallies, v_grid, a_grid);
}

Straddle straddling_excursion(PathView path, double t, const DecomposeOptions& options) {
  DecomposeOptions opt = options;
  opt.min_length = std::numeric_limits<double>::min();
  ExcursionDecomposition dec = decompose(path, opt);
  Straddle s;
  auto fill = [&](Excursion&& e) {
    s.g = e.start;
    s.d = e.complete ? e.end : kInf;
    s.excursion = std::move(e);
  };
  if (dec.leading && t <= dec.leading->end) {
    const bool hit = dec.leading->end < dec.total_time;
    s.found_zero = false;
    fill(std::move(*dec.leading));
    s.d = hit ? s.excursion.end : kInf;
    s.g = 0.0;
    return s;
  }
  auto it = std::lower_bound(dec.excursions.begin(), dec.excursions.end(), t,
                             [](const Excursion& e, double x) { return e.end < x; });
  if (it != dec.excursions.end() && it->start <= t) {
    fill(std::move(*it));
    return s;
  }
  if (dec.boundary && dec.boundary->start <= t) {
    fill(std::move(*dec.boundary));
    return s;
  }
  // t sits exactly on a zero between two pieces.
  Excursion point;
  point.start = point.end = t;
  point.V = 0.0;
  fill(std::move(point));
  s.d = t;
  return s;
}

Excursion normalized_shape(const Excursion& exc) {
  if (!exc.complete) throw Error("normalized_shape: excursion is incomplete");
  if (!(exc.V > 0.0)) throw Error("normalized_shape: excursion has zero length");
  Excursion out = exc;
  const double root = std::sqrt(exc.V);
  out.start = 0.0;
  out.end = 1.0;
  out.V = 1.0;
  out.M = exc.M / root;
  out.peak_time = exc.peak_time / exc.V;
  if (out.times.size() > 0) {
    out.times /= exc.V;
    out.times(out.times.size() - 1) = 1.0;
  }
  if (out.values.size() > 0) out.values /= root;
  return out;
}

std::optional<double> longest_excursion(PathView path, Window window, double param,
                                        const DecomposeOptions& options) {
  DecomposeOptions opt = options;
  opt.keep_values = false;
  double limit = 0.0;
  if (window == Window::tau_l) {
    const double eps = default_epsilon(path.times.empty() ? path.step : path.dt(0));
    const auto tau = inverse_local_time(path, param, eps);
    if (!tau) return std::nullopt;
    limit = *tau;
  } else {
    const Straddle s = straddling_excursion(path, param, opt);
    if (window == Window::g_t) {
      limit = s.g;
    } else {
      if (!std::isfinite(s.d)) return std::nullopt;
      limit = s.d;
    }
  }
  const ExcursionDecomposition dec = decompose(path, opt);
  double longest = 0.0;
  for (const Excursion& e : dec.excursions) {
    if (e.end > limit + 1e-12) break;
    longest = std::max(longest, e.V);
  }
  if (dec.leading && dec.leading->end <= limit + 1e-12 && window == Window::d_t)
    longest = std::max(longest, dec.leading->V);
  return longest;
}

}  // namespace lotex
