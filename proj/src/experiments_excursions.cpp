// Excursion theory: Ito-measure tails, straddling excursions, Williams
// decompositions, and functionals of Brownian motion at tau_l.

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "experiment_kit.hpp"
#include "lotex/excursions.hpp"
#include "lotex/parallel.hpp"
#include "lotex/quadrature.hpp"
#include "lotex/reflaws.hpp"

namespace lotex::kit {

namespace {

TauWalk walk_settings(const Context& ctx) {
  TauWalk w;
  w.base_dt = ctx.dt;
  w.scale = ctx.param("scale", 0.1);
  return w;
}

struct TauFunctionals {
  double a_plus = 0.0;
  double sup = 0.0;
  double integral = 0.0;  ///< int |B|^gamma ds when requested
  bool reached = false;
};

TauFunctionals walk_functionals(double l, const TauWalk& w, std::uint64_t seed, double gamma = 0.0) {
  Rng rng(seed);
  TauFunctionals f;
  f.reached = walk_to_local_time(l, w, rng, [&](double a, double b, double, double h) {
    f.a_plus += positive_fraction(a, b) * h;
    update_sup(f.sup, a, b, h, rng);
    if (gamma > 0.0) {
      if ((a >= 0.0) == (b >= 0.0)) {
        f.integral += 0.5 * (std::pow(std::abs(a), gamma) + std::pow(std::abs(b), gamma)) * h;
      } else {
        // Linear interpolation through the zero.
        const double span = std::abs(a) + std::abs(b);
        f.integral += (std::pow(std::abs(a), gamma + 1.0) + std::pow(std::abs(b), gamma + 1.0)) / ((gamma + 1.0) * span) * h;
      }
    }
  });
  return f;
}

/// Brownian motion on the level-scaled clock stopped when its local time at 0
/// reaches l; `local_time` is the value at the stop.
struct ClockedTau {
  ClockedPath path;
  double local_time = 0.0;
};

ClockedTau clocked_to_local_time(double l, double base_dt, double scale, std::uint64_t seed, std::size_t max_steps) {
  Rng rng(mix_seed(seed, 0x1f));
  ClockedTau out;
  double prev = 0.0;
  out.path = sample_brownian_scaled_clock(base_dt, scale, 0.0, seed, max_steps, [&](double, double x, double h) {
    if (!bridge_misses(prev, x, h)) out.local_time += bridge_local_time(prev, x, h, rng.uniform_pos());
    prev = x;
    return out.local_time >= l;
  });
  return out;
}

std::string point_label(const std::string& prefix, double v) {
  std::ostringstream s;
  s << prefix << " = " << v;
  return s.str();
}

ExperimentResult knight_identity(const Context& ctx) {
  const TauWalk w = walk_settings(ctx);
  const std::vector<double> x = parallel_map(ctx.n, [&](std::size_t i) {
    const TauFunctionals f = walk_functionals(1.0, w, ctx.stream(1, i));
    return f.reached ? f.a_plus / (f.sup * f.sup) : kInf;
  });
  std::vector<double> lambdas;
  for (double mu : {0.5, 1.0, 2.0}) lambdas.push_back(0.5 * mu * mu);
  const auto target = [](double lam) { return knight_laplace(std::sqrt(2.0 * lam)); };
  Checks c;
  c.add("A+ / S^2, Laplace grid at mu = 0.5, 1, 2", laplace_grid_test(x, target, lambdas, 4.0, 0.02));
  // The same transform read with the ratio halved, reported only.
  double worst = 0.0;
  for (double lam : lambdas) {
    std::vector<double> e(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) e[i] = std::isfinite(x[i]) ? std::exp(-0.5 * lam * x[i]) : 0.0;
    const double m = mean(e);
    c.note(point_label("A+ / (2 S^2) transform, mu", std::sqrt(2.0 * lam)), m);
    worst = std::max(worst, std::abs(m - target(lam)));
  }
  c.note("A+ / (2 S^2) max deviation", worst);
  std::vector<double> hits(ctx.n);
  for (std::size_t i = 0; i < ctx.n; ++i) hits[i] = std::isfinite(x[i]) ? 0.0 : 1.0;
  c.note("unreached", mean(hits) * static_cast<double>(ctx.n));
  return {c.finish(ctx), std::nullopt};
}

ExperimentResult coth_transform(const Context& ctx) {
  struct Point {
    double l, mu, a;
  };
  const std::vector<Point> points{{1.0, 1.0, 1.0}, {0.5, 1.0, 0.5}, {1.0, 2.0, 1.0}};
  const TauWalk w = walk_settings(ctx);
  const auto full = parallel_map(ctx.n, [&](std::size_t i) { return walk_functionals(1.0, w, ctx.stream(1, i)); });
  const auto half = parallel_map(ctx.n, [&](std::size_t i) { return walk_functionals(0.5, w, ctx.stream(2, i)); });
  std::vector<double> est, se;
  Candidate halved{"exp(-l mu coth(mu a) / 2)", {}}, printed{"exp(-l mu coth(mu a))", {}};
  for (const Point& p : points) {
    const auto& rows = p.l == 1.0 ? full : half;
    std::vector<double> v(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      v[i] = rows[i].reached && rows[i].sup <= p.a ? std::exp(-0.5 * p.mu * p.mu * rows[i].a_plus) : 0.0;
    est.push_back(mean(v));
    se.push_back(std_error(v));
    halved.values.push_back(coth_functional(p.l, p.mu, p.a, true));
    printed.values.push_back(coth_functional(p.l, p.mu, p.a, false));
  }
  Checks c;
  const TestReport verdict = adjudicate(est, se, {halved, printed});
  c.add("verdict", verdict);
  c.note("verdict", verdict.details.at("verdict"));
  return {c.finish(ctx), std::nullopt};
}

ExperimentResult excursion_tails(const Context& ctx) {
  const double l = ctx.param("l", 1.0);
  const double scale = ctx.param("scale", 0.05);
  Eigen::ArrayXd v_grid(3), a_grid(5);
  v_grid << 0.01, 0.1, 1.0;
  a_grid << 0.1, 0.2, 0.5, 1.0, 2.0;
  const auto tallies = parallel_map(ctx.n, [&](std::size_t i) {
    const ClockedTau walk = clocked_to_local_time(l, ctx.dt, scale, ctx.stream(1, i), 50'000'000);
    DecomposeOptions opt;
    opt.bridge_max = true;
    opt.bridge_zeros = true;
    opt.keep_values = false;
    opt.seed = ctx.stream(2, i);
    return tally_excursions(decompose(walk.path, opt), v_grid, a_grid, walk.local_time);
  });
  const ItoTailEstimate est = ito_tail_estimates(tallies, v_grid, a_grid);
  Checks c;
  for (Eigen::Index k = 0; k < 4; ++k) {
    const double a = a_grid(k);
    c.add(point_label("a n(M >= a), a", a),
          tolerance_check(a * est.height.rate(k), 0.5, 0.025));
  }
  for (Eigen::Index k = 0; k < v_grid.size(); ++k) {
    const double v = v_grid(k);
    c.add(point_label("sqrt(pi v / 2) n(V >= v), v", v),
          tolerance_check(std::sqrt(M_PI * v / 2.0) * est.length.rate(k), 1.0, 0.05));
  }
  std::vector<double> band_low, band_mid;
  for (const auto& t : tallies) {
    band_low.push_back(t.height_counts(0) - t.height_counts(1));
    band_mid.push_back(t.height_counts(1) - t.height_counts(2));
  }
  c.add("dispersion of counts with M in [0.2, 0.5)", dispersion_test(band_mid, 0.9, 1.1));
  c.add("bands [0.1, 0.2) and [0.2, 0.5) uncorrelated", correlation_test(band_low, band_mid, 4.0));
  c.note("mean local time", est.mean_local_time);
  return {c.finish(ctx), std::nullopt};
}

ExperimentResult longest_excursion_law(const Context& ctx) {
  const double scale = ctx.param("scale", 0.05);
  const std::vector<double> d = parallel_map(ctx.n, [&](std::size_t i) {
    const ClockedTau walk = clocked_to_local_time(1.0, ctx.dt, scale, ctx.stream(1, i), 50'000'000);
    DecomposeOptions opt;
    opt.bridge_zeros = true;
    opt.keep_values = false;
    opt.seed = ctx.stream(2, i);
    const ExcursionDecomposition dec = decompose(walk.path, opt);
    double longest = 0.0;
    for (const Excursion& e : dec.excursions) longest = std::max(longest, e.end - e.start);
    return walk.local_time >= 1.0 ? longest : kInf;
  });
  const double grid_dt = ctx.param("grid_dt", 1e-4);
  const TimeGrid grid = TimeGrid::over(1.0, grid_dt);
  const std::vector<double> w = parallel_map(ctx.n, [&](std::size_t i) {
    const Path p = sample_brownian(grid, 0.0, ctx.stream(3, i));
    DecomposeOptions opt;
    opt.bridge_zeros = true;
    opt.keep_values = false;
    opt.seed = ctx.stream(4, i);
    const std::optional<double> dg = longest_excursion(p, Window::g_t, 1.0, opt);
    return dg && *dg > 0.0 ? std::exp(-1.0 / *dg) : 0.0;
  });
  const double f1 = integrate_to_infinity([](double v) { return std::exp(-v) / std::sqrt(2.0 * M_PI * v * v * v); }, 1.0,
                                          1e-12);
  const Law law = law_catalog("longest_excursion_tau", {1.0});
  Checks c;
  c.add("D at tau_1", ks_one_sample(d, law.cdf, ctx.bias(0.02)));
  c.add("E exp(-1 / D at g_1)", moment_test(w, f1 / (f1 + std::sqrt(2.0)), 0.0, 0.02));
  return {c.finish(ctx), plot(d, law.density, "longest excursion before tau_1")};
}

// Brownian motion from 0 until |B| reaches c, continued until B returns to 0
// or |B| reaches K.
struct ReflectedRun {
  Path path;
  double t_c = 0.0;
  bool hit_cap = false;
};

ReflectedRun reflected_over_level(double c, double K, double dt, std::uint64_t seed) {
  std::size_t k_c = 0;
  int side = 0;
  bool cap = false;
  const auto max_steps = static_cast<std::size_t>(400.0 * K * K / dt);
  const StoppedPath sp = sample_brownian_until(dt, 0.0, seed, max_steps, [&](std::size_t k, double x) {
    if (side == 0) {
      if (std::abs(x) >= c) {
        k_c = k;
        side = x > 0.0 ? 1 : -1;
      }
      return false;
    }
    if (std::abs(x) >= K) {
      cap = true;
      return true;
    }
    return side * x <= 0.0;
  });
  if (!sp.stopped) throw Error("straddle_laws: step cap reached");
  return {sp.path, dt * static_cast<double>(k_c), cap};
}

ExperimentResult straddle_laws(const Context& ctx) {
  Checks c;
  // d_1 given g_1: the path is simulated on [0, 1] and d_1 - 1 is the exact hitting time of 0 from B_1.
  const TimeGrid grid = TimeGrid::over(1.0, ctx.dt);
  const auto n_gd = std::max<std::size_t>(6 * ctx.n, static_cast<std::size_t>(ctx.param("gd_paths", 40000.0)));
  const auto gd = parallel_map(n_gd, [&](std::size_t i) {
    const Path p = sample_brownian(grid, 0.0, ctx.stream(1, i));
    DecomposeOptions opt;
    opt.bridge_zeros = true;
    opt.keep_values = false;
    opt.seed = ctx.stream(2, i);
    const Straddle s = straddling_excursion(p, 1.0, opt);
    Rng rng(ctx.stream(6, i));
    const double z = rng.normal();
    const double x = p.end();
    return std::array<double, 2>{s.g, 1.0 + x * x / std::max(z * z, 1e-300)};
  });
  std::vector<double> g;
  for (const auto& r : gd) g.push_back(r[0]);
  BinTestOptions opt;
  opt.bins = 5;
  opt.lower = 0.0;
  opt.upper = 1.0;
  opt.max_error = 0.03;
  for (double a : {1.5, 2.0, 4.0}) {
    std::vector<double> y;
    for (const auto& r : gd) y.push_back(r[1] >= a ? 1.0 : 0.0);
    c.add(point_label("P(d_1 >= a | g_1), a", a),
          regression_bin_test(g, y, [a](double x) { return std::sqrt((1.0 - x) / (a - x)); }, opt));
  }
  c.note("paths for d_1 given g_1", static_cast<double>(n_gd));
  // Height of the excursion of |B| straddling T_c, and the maximum before g_{T_c}.
  const double level = ctx.param("c", 1.0);
  const double K = ctx.param("K", 10.0 * level);
  const auto hm = parallel_map(ctx.n, [&](std::size_t i) {
    const ReflectedRun run = reflected_over_level(level, K, ctx.dt, ctx.stream(3, i));
    const Path r = reflected(run.path);
    DecomposeOptions o;
    o.bridge_max = true;
    o.bridge_zeros = true;
    o.keep_values = false;
    o.seed = ctx.stream(4, i);
    const Straddle s = straddling_excursion(r, run.t_c, o);
    const double m = run.hit_cap ? K : std::min(s.excursion.M, K);
    Rng rng(ctx.stream(5, i));
    const auto upto = static_cast<std::size_t>(run.path.view().count_before(s.g));
    const std::span<const double> v(run.path.values.data(), std::max<std::size_t>(upto, 1));
    double before = bridge_sup(v, ctx.dt, rng, 0.0);
    std::vector<double> neg(v.begin(), v.end());
    for (double& x : neg) x = -x;
    before = std::max(before, bridge_sup(neg, ctx.dt, rng, 0.0));
    return std::array<double, 2>{m, std::min(before, level)};
  });
  std::vector<double> m, before;
  for (const auto& r : hm) {
    m.push_back(r[0]);
    before.push_back(r[1]);
  }
  const Law over = law_catalog("height_over_level", {level});
  c.add("M of the straddler of T_c ~ c / U",
        ks_one_sample(m, [&](double x) { return x >= K ? 1.0 : over.cdf(x); }, ctx.bias(0.02)));
  c.add("max before g_{T_c} uniform on [0, c]", ks_one_sample(before, law_catalog("uniform", {0.0, level}).cdf,
                                                              ctx.bias(0.02)));
  return {c.finish(ctx), plot(m, over.density, "height of the excursion straddling T_c")};
}

ExperimentResult meander_endpoint(const Context& ctx) {
  const TimeGrid grid = TimeGrid::over(1.0, ctx.dt);
  const std::vector<double> x = parallel_map(ctx.n, [&](std::size_t i) {
    const Path p = sample_brownian(grid, 0.0, ctx.stream(1, i));
    const PathFunctionals f = path_functionals(p, 1.0, default_epsilon(ctx.dt));
    return std::abs(p.end()) / std::sqrt(std::max(1.0 - f.g_t, ctx.dt));
  });
  const Law rayleigh = law_catalog("rayleigh");
  Checks c;
  c.add("|B_1| / sqrt(1 - g_1) Rayleigh", ks_one_sample(x, rayleigh.cdf, ctx.bias(0.02)));
  return {c.finish(ctx), plot(x, rayleigh.density, "meander endpoint vs Rayleigh")};
}

double norm3(const std::array<double, 3>& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

ExperimentResult post_gamma_bes3(const Context& ctx) {
  const double a = ctx.param("a", 1.0);
  const double t = ctx.param("t", 1.0);
  const double K = ctx.param("K", 6.0 * a);
  const auto max_steps = static_cast<std::size_t>(2000.0 * K * K / ctx.dt);
  const auto rows = parallel_map(ctx.n, [&](std::size_t i) {
    Rng rng(ctx.stream(1, i));
    const double sd = std::sqrt(ctx.dt);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    std::vector<double> radius{0.0};
    std::size_t last_below = 0;  // index into radius of the last point with R <= a
    for (std::size_t k = 0; k < max_steps; ++k) {
      for (double& v : x) v += sd * rng.normal();
      const double r = norm3(x);
      radius.push_back(r);
      if (r <= a) last_below = radius.size() - 1;
      if (r < K) continue;
      // From radius r the motion comes back to radius a with probability a / r.
      if (rng.uniform() < a / r) {
        x = {a, 0.0, 0.0};
        radius.assign(1, a);
        last_below = 0;
        continue;
      }
      const std::size_t target = last_below + static_cast<std::size_t>(std::llround(t / ctx.dt));
      if (target < radius.size()) return std::array<double, 2>{radius[target] - a, 0.0};
      return std::array<double, 2>{r - a, 1.0};
    }
    return std::array<double, 2>{kInf, 1.0};
  });
  std::vector<double> v;
  double late = 0.0;
  for (const auto& r : rows) {
    v.push_back(r[0]);
    late += r[1];
  }
  const Law bes3 = law_catalog("bes3_marginal", {t});
  Checks c;
  c.add("R(gamma_a + t) - a vs Bessel(3) from 0", ks_one_sample(v, bes3.cdf, ctx.bias(0.02)));
  c.note("unresolved paths", late);
  return {c.finish(ctx), plot(v, bes3.density, "R after the last passage at a")};
}

ExperimentResult excursion_over_Tc(const Context& ctx) {
  const double level = ctx.param("c", 1.0);
  const auto max_steps = static_cast<std::size_t>(400.0 * level * level / ctx.dt);
  const auto rising = parallel_map(ctx.n, [&](std::size_t i) {
    const StoppedPath sp = sample_brownian_until(ctx.dt, 0.0, ctx.stream(1, i), max_steps,
                                                 [&](std::size_t, double x) { return std::abs(x) >= level; });
    const Path r = reflected(sp.path);
    DecomposeOptions o;
    o.bridge_zeros = true;
    o.keep_values = false;
    o.seed = ctx.stream(2, i);
    const double tc = r.grid.horizon();
    const Straddle s = straddling_excursion(r, tc, o);
    const double mid = s.g + 0.5 * (tc - s.g);
    const double pos = mid / ctx.dt;
    const auto k = static_cast<Eigen::Index>(std::floor(pos));
    const double frac = pos - static_cast<double>(k);
    const double v = k + 1 < r.values.size() ? (1.0 - frac) * r.values(k) + frac * r.values(k + 1) : r.end();
    return std::array<double, 2>{tc - s.g, v};
  });
  const auto reference = parallel_map(ctx.n, [&](std::size_t i) {
    Rng rng(ctx.stream(3, i));
    const double sd = std::sqrt(ctx.dt);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    std::vector<double> radius{0.0};
    while (radius.back() < level && radius.size() <= max_steps) {
      for (double& v : x) v += sd * rng.normal();
      radius.push_back(norm3(x));
    }
    const double T = ctx.dt * static_cast<double>(radius.size() - 1);
    const double pos = 0.5 * static_cast<double>(radius.size() - 1);
    const auto k = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(k);
    const double v = k + 1 < radius.size() ? (1.0 - frac) * radius[k] + frac * radius[k + 1] : radius.back();
    return std::array<double, 2>{T, v};
  });
  std::vector<double> len, mid, len_ref, mid_ref;
  for (std::size_t i = 0; i < ctx.n; ++i) {
    len.push_back(rising[i][0]);
    mid.push_back(rising[i][1]);
    len_ref.push_back(reference[i][0]);
    mid_ref.push_back(reference[i][1]);
  }
  Checks c;
  c.add("length of the rising piece vs Bessel(3) hitting time", ks_two_sample(len, len_ref, ctx.bias(0.02)));
  c.add("value at half length", ks_two_sample(mid, mid_ref, ctx.bias(0.02)));
  return {c.finish(ctx), std::nullopt};
}

ExperimentResult williams_ito_consistency(const Context& ctx) {
  const double horizon = 4.0;
  const double min_v = ctx.param("min_v", 100.0 * ctx.dt);
  const TimeGrid grid = TimeGrid::over(horizon, ctx.dt);
  const auto rows = parallel_map(ctx.n, [&](std::size_t i) {
    const Path p = sample_brownian(grid, 0.0, ctx.stream(1, i));
    DecomposeOptions o;
    o.bridge_max = true;
    o.bridge_zeros = true;
    o.keep_values = false;
    o.seed = ctx.stream(2, i);
    const Straddle s = straddling_excursion(p, 1.0, o);
    if (!s.found_zero || !s.excursion.complete || !std::isfinite(s.d)) return std::array<double, 3>{-1.0, 0.0, 0.0};
    const double v = s.d - s.g;
    return std::array<double, 3>{v, s.excursion.peak_time / v, s.excursion.M / std::sqrt(v)};
  });
  std::vector<double> lengths;
  for (const auto& r : rows)
    if (r[0] >= min_v) lengths.push_back(r[0]);
  if (lengths.size() < 200) throw Error("williams_ito_consistency: too few complete straddlers");
  std::vector<double> sorted = lengths;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
  const double median = sorted[sorted.size() / 2];
  std::vector<double> peak_lo, peak_hi, height_lo, height_hi, height;
  for (const auto& r : rows) {
    if (r[0] < min_v) continue;
    (r[0] < median ? peak_lo : peak_hi).push_back(r[1]);
    (r[0] < median ? height_lo : height_hi).push_back(r[2]);
    height.push_back(r[2]);
  }
  const Law shape = law_catalog("excursion_height");
  Checks c;
  c.add("peak time / V independent of V", ks_two_sample(peak_lo, peak_hi, ctx.bias(0.02)));
  c.add("M / sqrt(V) independent of V", ks_two_sample(height_lo, height_hi, ctx.bias(0.02)));
  c.add("M / sqrt(V) vs normalized excursion maximum", ks_one_sample(height, shape.cdf, ctx.bias(0.02)));
  std::vector<double> mirrored(peak_hi);
  for (double& x : mirrored) x = 1.0 - x;
  c.add("peak time / V symmetric about 1/2", ks_two_sample(peak_lo, mirrored, ctx.bias(0.02)));
  c.note("complete straddlers", static_cast<double>(height.size()));
  c.note("median length", median);
  return {c.finish(ctx), plot(height, shape.density, "straddler height over sqrt(length)")};
}

ExperimentResult stable_from_excursions(const Context& ctx) {
  const double gamma = ctx.param("gamma", 1.0);
  const double l = ctx.param("l", 0.5);
  const double horizon = ctx.param("horizon", 400.0);
  TauWalk w = walk_settings(ctx);
  auto sample = [&](double level, double h, std::uint64_t tag) {
    TauWalk wl = w;
    wl.horizon = h;
    return parallel_map(ctx.n, [&](std::size_t i) {
      const TauFunctionals f = walk_functionals(level, wl, ctx.stream(tag, i), gamma);
      return f.reached ? f.integral : kInf;
    });
  };
  const std::vector<double> x2 = sample(2.0 * l, horizon, 1);
  std::vector<double> x1 = sample(l, horizon / 4.0, 2);
  const double factor = std::pow(2.0, 2.0 + gamma);
  for (double& v : x1) v *= factor;
  double censored = 0.0;
  for (double v : x2) censored += std::isfinite(v) ? 0.0 : 1.0;
  Checks c;
  c.add("X_2l vs 2^(2 + gamma) X_l", ks_two_sample(x2, x1, ctx.bias(0.02)));
  c.note("censored", censored);
  c.note("gamma", gamma);
  return {c.finish(ctx), std::nullopt};
}

ExperimentResult excursion_lt_law(const Context& ctx) {
  Checks c;
  std::optional<PlotData> fig;
  for (double x : {0.5, 1.0}) {
    const double top = 3.0 * x;
    const std::vector<double> lt = parallel_map(ctx.n, [&](std::size_t i) {
      Rng rng(ctx.stream(x == 0.5 ? 1 : 2, i));
      const double sd = std::sqrt(ctx.dt);
      double y = x, value = 0.0;
      for (std::size_t k = 0; k < 500'000'000; ++k) {
        double z = y + sd * rng.normal();
        if (z > top) z = 2.0 * top - z;
        if (z <= 0.0 || rng.uniform() < bridge_cross_probability(y, z, 0.0, ctx.dt)) return value;
        if (!bridge_misses(y, z, ctx.dt, x)) value += bridge_local_time(y, z, ctx.dt, rng.uniform_pos(), x);
        y = z;
      }
      return kInf;
    });
    const Law law = law_catalog("excursion_local_time", {x});
    c.add(point_label("local time at x, x", x), ks_one_sample(lt, law.cdf, ctx.bias(0.02)));
    if (!fig) fig = plot(lt, law.density, "local time at 1/2 of an excursion reaching 1/2");
  }
  return {c.finish(ctx), fig};
}

ExperimentResult watanabe_law(const Context& ctx) {
  const double l = 1.0;
  const std::vector<double> xs{0.25, 0.5, 1.0, 2.0};
  const TauWalk w = walk_settings(ctx);
  const auto sup = parallel_map(ctx.n, [&](std::size_t i) {
    const TauFunctionals f = walk_functionals(l, w, ctx.stream(1, i));
    return f.reached ? f.sup : kInf;
  });
  std::vector<double> est, se;
  Candidate tail{"exp(-l / (2x))", {}}, printed{"exp(-2l / x)", {}};
  const Law a = law_catalog("watanabe_excursion", {l}), b = law_catalog("watanabe_printed", {l});
  for (double x : xs) {
    std::vector<double> ind(sup.size());
    for (std::size_t i = 0; i < sup.size(); ++i) ind[i] = sup[i] <= x ? 1.0 : 0.0;
    est.push_back(mean(ind));
    se.push_back(std_error(ind));
    tail.values.push_back(a.cdf(x));
    printed.values.push_back(b.cdf(x));
  }
  Checks c;
  const TestReport verdict = adjudicate(est, se, {tail, printed});
  c.add("verdict", verdict);
  c.note("verdict", verdict.details.at("verdict"));
  return {c.finish(ctx), plot(sup, a.density, "S at tau_1 vs exp(-1 / 2x)")};
}

}  // namespace

void register_excursion_experiments(std::vector<Entry>& out) {
  using V = std::vector<std::string>;
  out.push_back({info("knight_identity", "A+ / S^2 at tau_1 has the law of the Bessel(3) hitting time of 2",
                      V{"bridge_local_time", "knight_laplace"}, V{"laplace_grid_test"}, 20000, 2.5e-5, 3000, 1e-4,
                      3.0),
                 knight_identity});
  out.push_back({info("coth_transform", "E[exp(-mu^2 A+ / 2); S <= a] at tau_l: halved or printed exponent",
                      V{"bridge_local_time", "coth_functional"}, V{"mean", "std_error"}, 20000, 2.5e-5, 3000, 1e-4, 3.0,
                      true),
                 coth_transform});
  out.push_back({info("excursion_tails", "Ito measure tails n(M >= a) = 1 / 2a and n(V >= v) = sqrt(2 / pi v)",
                      V{"sample_brownian_scaled_clock", "decompose", "tally_excursions", "ito_tail_estimates"},
                      V{"dispersion_test", "correlation_test"}, 20000, 2e-5, 3000, 1e-4, 3.0),
                 excursion_tails});
  out.push_back({info("longest_excursion", "longest excursion before tau_1 and before g_1",
                      V{"sample_brownian_scaled_clock", "decompose", "longest_excursion"},
                      V{"ks_one_sample", "moment_test"}, 10000, 2e-5, 2000, 1e-4, 3.0),
                 longest_excursion_law});
  out.push_back({info("straddle_laws", "d_1 given g_1, height of the straddler of T_c, maximum before g_{T_c}",
                      V{"straddling_excursion", "reflected"}, V{"regression_bin_test", "ks_one_sample"}, 10000, 1e-3,
                      2000, 2e-3, 12.0),
                 straddle_laws});
  out.push_back({info("meander_endpoint", "|B_1| / sqrt(1 - g_1) is Rayleigh", V{"path_functionals"},
                      V{"ks_one_sample"}, 20000, 1e-4, 4000, 1e-3, 1.0),
                 meander_endpoint});
  out.push_back({info("post_gamma_bes3", "Bessel(3) after its last passage at a is a + Bessel(3) from 0",
                      V{"law_catalog"}, V{"ks_one_sample"}, 10000, 1e-3, 2000, 2e-3, 15.0),
                 post_gamma_bes3});
  out.push_back({info("excursion_over_Tc", "rising piece of the excursion straddling T_c is Bessel(3) up to c",
                      V{"straddling_excursion", "reflected"}, V{"ks_two_sample"}, 20000, 1e-4, 3000, 1e-3, 1.5),
                 excursion_over_Tc});
  out.push_back({info("williams_ito_consistency", "shape of the straddling excursion is independent of its length",
                      V{"straddling_excursion", "law_catalog"}, V{"ks_two_sample", "ks_one_sample"}, 10000, 1e-4,
                      3000, 1e-3, 4.0),
                 williams_ito_consistency});
  out.push_back({info("stable_from_excursions", "int_0^tau_l |B|^gamma ds is stable of index 1 / (2 + gamma)",
                      V{"bridge_local_time"}, V{"ks_two_sample"}, 10000, 2.5e-5, 2000, 1e-4, 6.0),
                 stable_from_excursions});
  out.push_back({info("excursion_lt_law", "local time at x of an excursion reaching x is exponential with mean 2x",
                      V{"bridge_local_time", "law_catalog"}, V{"ks_one_sample"}, 10000, 1e-4, 2000, 1e-3, 4.0),
                 excursion_lt_law});
  out.push_back({info("watanabe_law", "S at tau_l: exp(-l / 2x) or exp(-2l / x)",
                      V{"bridge_local_time", "law_catalog"}, V{"mean", "std_error"}, 20000, 2.5e-5, 3000, 1e-4, 3.0, true),
                 watanabe_law});
}

}  // namespace lotex::kit
