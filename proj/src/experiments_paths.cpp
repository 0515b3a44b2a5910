// Brownian path functionals: local times, Levy and Pitman identities,
// arcsine laws, Ray-Knight theorems, squared Bessel additivity.

#include <algorithm>
#include <array>
#include <cmath>

#include "experiment_kit.hpp"
#include "lotex/parallel.hpp"
#include "lotex/reflaws.hpp"
#include "lotex/sturm.hpp"

namespace lotex::kit {

namespace {

std::span<const double> span_of(const Path& p) {
  return {p.values.data(), static_cast<std::size_t>(p.values.size())};
}

std::vector<double> column(const std::vector<std::array<double, 2>>& rows, std::size_t j) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[j]);
  return out;
}

ExperimentResult local_time_moments(const Context& ctx) {
  const double eps = ctx.param("eps", default_epsilon(ctx.dt));
  const TimeGrid grid = TimeGrid::over(1.0, ctx.dt);
  const std::vector<double> lt = parallel_map(ctx.n, [&](std::size_t i) {
    return centered_local_time(sample_brownian(grid, 0.0, ctx.stream(1, i)), 0.0, 1.0, eps);
  });
  std::vector<double> sq(lt.size()), quart(lt.size());
  for (std::size_t i = 0; i < lt.size(); ++i) {
    sq[i] = lt[i] * lt[i];
    quart[i] = sq[i] * sq[i];
  }
  Checks c;
  c.add("second moment", relative_mean_test(sq, 1.0, 0.03));
  c.note("first moment", mean(lt));
  c.note("fourth moment", mean(quart));
  c.note("epsilon", eps);
  return {c.finish(ctx), plot(lt, law_catalog("reflected_sup", {1.0}).density, "local time at 0, t = 1")};
}

ExperimentResult levy_equivalence(const Context& ctx) {
  const double eps = ctx.param("eps", default_epsilon(ctx.dt));
  const TimeGrid grid = TimeGrid::over(1.0, ctx.dt);
  const auto sup_side = parallel_map(ctx.n, [&](std::size_t i) {
    const Path p = sample_brownian(grid, 0.0, ctx.stream(1, i));
    Rng rng(ctx.stream(2, i));
    const double s = bridge_sup(span_of(p), ctx.dt, rng, 0.0);
    return std::array<double, 2>{s - p.end(), s};
  });
  const auto lt_side = parallel_map(ctx.n, [&](std::size_t i) {
    const Path p = sample_brownian(grid, 0.0, ctx.stream(3, i));
    return std::array<double, 2>{std::abs(p.end()), centered_local_time(p, 0.0, 1.0, eps)};
  });
  const std::vector<double> drawdown = column(sup_side, 0), sup = column(sup_side, 1);
  const std::vector<double> absb = column(lt_side, 0), lt = column(lt_side, 1);
  Checks c;
  c.add("S - B vs |B|", ks_two_sample(drawdown, absb));
  c.add("S vs L", ks_two_sample(sup, lt, ctx.bias(0.02)));
  return {c.finish(ctx), plot(lt, law_catalog("reflected_sup", {1.0}).density, "local time vs |N(0,1)| density")};
}

ExperimentResult pitman(const Context& ctx) {
  const TimeGrid grid = TimeGrid::over(1.0, ctx.dt);
  const auto rows = parallel_map(ctx.n, [&](std::size_t i) {
    const Path p = sample_brownian(grid, 0.0, ctx.stream(1, i));
    Rng rng(ctx.stream(2, i));
    const double s = bridge_sup(span_of(p), ctx.dt, rng, 0.0);
    return std::array<double, 2>{2.0 * s - p.end(), s};
  });
  std::vector<double> r = column(rows, 0), ratio(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) ratio[i] = rows[i][1] / rows[i][0];
  const Law bes3 = law_catalog("bes3_marginal", {1.0});
  const Law unif = law_catalog("uniform", {0.0, 1.0});
  std::vector<double> edges;
  for (int k = 1; k < 10; ++k) edges.push_back(0.1 * k);
  Checks c;
  c.add("2S - B vs Bessel(3)", ks_one_sample(r, bes3.cdf));
  c.add("S / (2S - B) uniform bins", cdf_bin_test(ratio, unif.cdf, edges, 0.03));
  c.add("S / (2S - B) uniform KS", ks_one_sample(ratio, unif.cdf));
  return {c.finish(ctx), plot(r, bes3.density, "2S - B at t = 1 vs Bessel(3)")};
}

ExperimentResult pitman_drift(const Context& ctx) {
  const double mu = ctx.param("mu", 1.0);
  const double t = 1.0;
  const TimeGrid grid = TimeGrid::over(t, ctx.dt);
  const auto pitman_side = parallel_map(ctx.n, [&](std::size_t i) {
    Path p = sample_brownian(grid, 0.0, ctx.stream(1, i));
    for (Eigen::Index k = 0; k < p.values.size(); ++k) p.values(k) += mu * grid.time(static_cast<std::size_t>(k));
    // Drift does not change the bridge between grid points.
    Rng rng(ctx.stream(2, i));
    const double s = bridge_sup(span_of(p), ctx.dt, rng, 0.0);
    return 2.0 * s - p.end();
  });
  const std::size_t steps = grid.n_steps;
  const auto euler_side = parallel_map(ctx.n, [&](std::size_t i) {
    Rng rng(ctx.stream(3, i));
    const double sd = std::sqrt(ctx.dt);
    // First step from the origin, where the process is Bessel(3) to leading order.
    double x = sd * std::sqrt(std::pow(rng.normal(), 2) + std::pow(rng.normal(), 2) + std::pow(rng.normal(), 2));
    for (std::size_t k = 1; k < steps; ++k) x = std::abs(x + mu / std::tanh(mu * x) * ctx.dt + sd * rng.normal());
    return x;
  });
  const auto exact_side = parallel_map(ctx.n, [&](std::size_t i) {
    Rng rng(ctx.stream(4, i));
    const double s = std::sqrt(t);
    const double a = s * rng.normal() + mu * t, b = s * rng.normal(), d = s * rng.normal();
    return std::sqrt(a * a + b * b + d * d);
  });
  Checks c;
  c.add("2S - B vs coth-drift Euler", ks_two_sample(pitman_side, euler_side, ctx.bias(0.02)));
  c.add("2S - B vs radial part of drifted 3-d motion", ks_two_sample(pitman_side, exact_side, ctx.bias(0.02)));
  c.note("mu", mu);
  return {c.finish(ctx), std::nullopt};
}

ExperimentResult b_gamma_uniform(const Context& ctx) {
  const double a = ctx.param("a", 1.0);
  const auto max_steps = static_cast<std::size_t>(50.0 * a * a / ctx.dt);
  const auto rows = parallel_map(ctx.n, [&](std::size_t i) {
    Rng rng(ctx.stream(1, i));
    const double sd = std::sqrt(ctx.dt);
    double b = 0.0, s = 0.0;
    for (std::size_t k = 1; k <= max_steps; ++k) {
      const double prev = b;
      b += sd * rng.normal();
      update_sup(s, prev, b, ctx.dt, rng);
      if (2.0 * s - b >= a) return std::array<double, 2>{2.0 * s - a, static_cast<double>(k) * ctx.dt};
    }
    return std::array<double, 2>{kInf, kInf};
  });
  const std::vector<double> b = column(rows, 0), gamma = column(rows, 1);
  const Law unif = law_catalog("uniform", {-a, a});
  Checks c;
  c.add("B at Gamma_a uniform", ks_one_sample(b, unif.cdf, ctx.bias(0.02)));
  c.add("E Gamma_a = a^2 / 3", moment_test(gamma, a * a / 3.0, 4.0, 0.01 * a * a));
  return {c.finish(ctx), plot(b, unif.density, "B at Gamma_a vs uniform")};
}

ExperimentResult arcsine_pair(const Context& ctx) {
  const double eps = default_epsilon(ctx.dt);
  const TimeGrid grid = TimeGrid::over(1.0, ctx.dt);
  const auto rows = parallel_map(ctx.n, [&](std::size_t i) {
    const PathFunctionals f = path_functionals(sample_brownian(grid, 0.0, ctx.stream(1, i)), 1.0, eps);
    return std::array<double, 2>{f.g_t, f.A_plus};
  });
  const std::vector<double> g = column(rows, 0), a = column(rows, 1);
  const Law arcsine = law_catalog("arcsine");
  Checks c;
  c.add("g_1 arcsine", ks_one_sample(g, arcsine.cdf, ctx.bias(0.02)));
  c.add("A+_1 arcsine", ks_one_sample(a, arcsine.cdf, ctx.bias(0.02)));
  return {c.finish(ctx), plot(a, arcsine.density, "time positive vs arcsine")};
}

ExperimentResult conditional_sign(const Context& ctx) {
  const TimeGrid grid = TimeGrid::over(1.0, ctx.dt);
  const auto rows = parallel_map(ctx.n, [&](std::size_t i) {
    const Path p = sample_brownian(grid, 0.0, ctx.stream(1, i));
    const PathFunctionals f = path_functionals(p, 1.0, default_epsilon(ctx.dt));
    return std::array<double, 2>{f.A_plus, p.end() > 0.0 ? 1.0 : 0.0};
  });
  BinTestOptions opt;
  opt.bins = 10;
  opt.lower = 0.0;
  opt.upper = 1.0;
  opt.max_error = 0.03;
  Checks c;
  c.add("P(B_1 > 0 | A+_1) = A+_1", regression_bin_test(column(rows, 0), column(rows, 1),
                                                          [](double x) { return x; }, opt));
  return {c.finish(ctx), std::nullopt};
}

ExperimentResult bridge_lt_rayleigh(const Context& ctx) {
  const double eps = ctx.param("eps", default_epsilon(ctx.dt));
  const TimeGrid grid = TimeGrid::over(1.0, ctx.dt);
  const auto rows = parallel_map(ctx.n, [&](std::size_t i) {
    const Path p = sample_bridge(1.0, grid, ctx.stream(1, i));
    Rng rng(ctx.stream(2, i));
    double exact = 0.0;
    for (Eigen::Index k = 0; k + 1 < p.values.size(); ++k) {
      const double a = p.values(k), b = p.values(k + 1);
      if (!bridge_misses(a, b, ctx.dt)) exact += bridge_local_time(a, b, ctx.dt, rng.uniform_pos());
    }
    return std::array<double, 2>{exact, centered_local_time(p, 0.0, 1.0, eps)};
  });
  const std::vector<double> lt = column(rows, 0), occupation = column(rows, 1);
  const Law rayleigh = law_catalog("rayleigh");
  Checks c;
  c.add("bridge local time Rayleigh", ks_one_sample(lt, rayleigh.cdf, ctx.bias(0.02)));
  c.add("mean sqrt(pi / 2)", moment_test(lt, std::sqrt(M_PI / 2.0)));
  c.note("occupation estimate: KS distance", ks_one_sample(occupation, rayleigh.cdf).statistic);
  c.note("occupation estimate: mean", mean(occupation));
  return {c.finish(ctx), plot(lt, rayleigh.density, "bridge local time vs Rayleigh")};
}

ExperimentResult trivariate_transform(const Context& ctx) {
  struct Point {
    double lambda, mu, alpha;
  };
  const std::vector<Point> points{{1.0, 1.0, 0.0}, {1.0, 2.0, 0.5}, {2.0, 1.0, 0.25}};
  double slowest = kInf;
  for (const Point& p : points) slowest = std::min({slowest, p.lambda * p.lambda, p.mu * p.mu});
  // Past this time every weight is below e^-40.
  const double cutoff = 80.0 / slowest;
  const auto max_steps = static_cast<std::size_t>(std::ceil(cutoff / ctx.dt));
  const auto rows = parallel_map(ctx.n, [&](std::size_t i) {
    Rng rng(ctx.stream(1, i));
    const double sd = std::sqrt(ctx.dt);
    double x = 0.0, ap = 0.0, am = 0.0, lt = 0.0;
    bool hit = false;
    for (std::size_t k = 0; k < max_steps && !hit; ++k) {
      const double y = x + sd * rng.normal();
      double h = ctx.dt;
      if (y >= 1.0) {
        h = ctx.dt * (1.0 - x) / (y - x);
        hit = true;
      } else if (rng.uniform() < bridge_cross_probability(x, y, 1.0, ctx.dt)) {
        h = 0.5 * ctx.dt;
        hit = true;
      }
      const double frac = positive_fraction(x, std::min(y, 1.0));
      ap += frac * h;
      am += (1.0 - frac) * h;
      if (!bridge_misses(x, y, ctx.dt)) lt += bridge_local_time(x, y, ctx.dt, rng.uniform_pos());
      x = y;
    }
    return std::array<double, 4>{ap, am, lt, hit ? 1.0 : 0.0};
  });
  Checks c;
  const double q = bonferroni_multiplier(4.0, points.size());
  std::vector<double> w(rows.size());
  for (const Point& p : points) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      w[i] = r[3] > 0.0 ? std::exp(-0.5 * p.lambda * p.lambda * r[0] - 0.5 * p.mu * p.mu * r[1] - p.alpha * r[2]) : 0.0;
    }
    const double target = trivariate_laplace(p.lambda, p.mu, p.alpha);
    std::ostringstream label;
    label << "(lambda, mu, alpha) = (" << p.lambda << ", " << p.mu << ", " << p.alpha << ")";
    c.add(label.str(), moment_test(w, target, q, 0.005));
  }
  return {c.finish(ctx), std::nullopt};
}

// Reflected Brownian motion |B| until it reaches 1; local times at levels in
// (0, 1) have the law of those of B before T_1.
ExperimentResult ray_knight_T1(const Context& ctx) {
  const double eps = ctx.param("eps", default_epsilon(ctx.dt));
  const std::array<double, 3> as{0.25, 0.5, 0.75};
  const auto max_steps = static_cast<std::size_t>(60.0 / ctx.dt);
  const auto rows = parallel_map(ctx.n, [&](std::size_t i) {
    Rng rng(ctx.stream(3, i));
    double prev = 0.0;
    const StoppedPath sp = sample_brownian_until(ctx.dt, 0.0, ctx.stream(1, i), max_steps,
                                                 [&](std::size_t k, double x) {
                                                   const double a = prev;
                                                   prev = x;
                                                   if (std::abs(x) >= 1.0) return true;
                                                   if (k == 0) return false;
                                                   const double p = bridge_cross_probability(a, x, 1.0, ctx.dt) +
                                                                    bridge_cross_probability(-a, -x, 1.0, ctx.dt);
                                                   return rng.uniform() < p;
                                                 });
    const Path r = reflected(sp.path);
    const double end = r.grid.horizon();
    std::array<double, 4> out{};
    for (std::size_t j = 0; j < as.size(); ++j) out[j] = centered_local_time(r, 1.0 - as[j], end, eps);
    out[3] = sp.stopped ? 1.0 : 0.0;
    return out;
  });
  Checks c;
  std::vector<std::vector<double>> field(as.size());
  for (std::size_t j = 0; j < as.size(); ++j) {
    for (const auto& r : rows) field[j].push_back(r[j]);
    std::ostringstream label;
    label << "a = " << as[j];
    c.add(label.str() + " mean 2a", relative_mean_test(field[j], 2.0 * as[j], 0.05));
    c.add(label.str() + " exponential", ks_one_sample(field[j], law_catalog("exp", {2.0 * as[j]}).cdf, ctx.bias(0.02)));
  }
  // Increment of the field between a = 0.25 and a = 0.75 against Q^2_0.
  const TimeGrid besq_grid{0.25, 3};
  const std::vector<double> inc_besq = parallel_map(ctx.n, [&](std::size_t i) {
    const Path z = sample_besq(2.0, 0.0, besq_grid, ctx.stream(2, i));
    return z.values(3) - z.values(1);
  });
  std::vector<double> inc_field(ctx.n);
  for (std::size_t i = 0; i < ctx.n; ++i) inc_field[i] = field[2][i] - field[0][i];
  c.add("increment vs BESQ(2)", ks_two_sample(inc_field, inc_besq, ctx.bias(0.02)));
  double stopped = 0.0;
  for (const auto& r : rows) stopped += r[3];
  c.note("unstopped", static_cast<double>(ctx.n) - stopped);
  return {c.finish(ctx), plot(field[1], law_catalog("exp", {1.0}).density, "local time at 1/2 before T_1")};
}

// Brownian motion folded into [-w, w] up to the inverse local time at 0.
// Local times inside (-w, w) keep their joint law.
struct FoldedTau {
  Path folded;
  bool stopped = false;
};

FoldedTau folded_to_tau(double l, double w, double dt, std::uint64_t seed, std::size_t max_steps) {
  Rng rng(mix_seed(seed, 0x7a));
  double lt = 0.0, prev = 0.0;
  auto fold = [w](double x) {
    const double period = 4.0 * w;
    double y = std::fmod(x + w, period);
    if (y < 0.0) y += period;
    return y <= 2.0 * w ? y - w : 3.0 * w - y;
  };
  const StoppedPath sp = sample_brownian_until(dt, 0.0, seed, max_steps, [&](std::size_t k, double x) {
    const double cur = fold(x);
    if (k > 0 && !bridge_misses(prev, cur, dt)) lt += bridge_local_time(prev, cur, dt, rng.uniform_pos());
    prev = cur;
    return lt >= l;
  });
  return {folded(sp.path, w), sp.stopped};
}

ExperimentResult ray_knight_tau(const Context& ctx) {
  const double eps = ctx.param("eps", default_epsilon(ctx.dt));
  const double w = 1.5;
  const std::array<double, 3> xs{0.25, 0.5, 1.0};
  const auto max_steps = static_cast<std::size_t>(200.0 / ctx.dt);
  const auto rows = parallel_map(ctx.n, [&](std::size_t i) {
    const FoldedTau f = folded_to_tau(1.0, w, ctx.dt, ctx.stream(1, i), max_steps);
    const double end = f.folded.grid.horizon();
    std::array<double, 7> out{};
    for (std::size_t j = 0; j < xs.size(); ++j) {
      out[j] = centered_local_time(f.folded, xs[j], end, eps);
      out[3 + j] = centered_local_time(f.folded, -xs[j], end, eps);
    }
    out[6] = f.stopped ? 1.0 : 0.0;
    return out;
  });
  Checks c;
  std::vector<std::vector<double>> right(xs.size()), left(xs.size());
  for (const auto& r : rows)
    for (std::size_t j = 0; j < xs.size(); ++j) {
      right[j].push_back(r[j]);
      left[j].push_back(r[3 + j]);
    }
  for (std::size_t j = 0; j < xs.size(); ++j) {
    std::ostringstream label;
    label << "x = " << xs[j];
    c.add(label.str() + " mean 1", relative_mean_test(right[j], 1.0, 0.05));
    c.add(label.str() + " left/right correlation", correlation_test(right[j], left[j], 4.0));
  }
  double stopped = 0.0;
  for (const auto& r : rows) stopped += r[6];
  c.note("unstopped", static_cast<double>(ctx.n) - stopped);
  return {c.finish(ctx), std::nullopt};
}

ExperimentResult ray_knight_functional(const Context& ctx) {
  const double eps = ctx.param("eps", default_epsilon(ctx.dt));
  const double w = 1.5;
  const auto max_steps = static_cast<std::size_t>(200.0 / ctx.dt);
  const auto rows = parallel_map(ctx.n, [&](std::size_t i) {
    const FoldedTau f = folded_to_tau(1.0, w, ctx.dt, ctx.stream(1, i), max_steps);
    const auto& v = f.folded.values;
    double occ = 0.0;
    for (Eigen::Index k = 0; k + 1 < v.size(); ++k)
      if (v(k) >= 0.0 && v(k) < 1.0) occ += ctx.dt;
    return std::array<double, 2>{occ, centered_local_time(f.folded, 1.0, f.folded.grid.horizon(), eps)};
  });
  PotentialSpec unit_strip;
  unit_strip.f = [](double x) { return x < 1.0 ? 1.0 : 0.0; };
  unit_strip.breakpoints = {1.0};
  unit_strip.x_max = 4.0;
  const SLSolution strip = solve_decreasing(unit_strip);
  PotentialSpec atom;
  atom.atoms = {{1.0, 2.0}};
  atom.x_max = 3.0;
  const SLSolution point = solve_decreasing(atom);
  std::vector<double> w_strip, w_point;
  for (const auto& r : rows) {
    w_strip.push_back(std::exp(-0.5 * r[0]));
    w_point.push_back(std::exp(-r[1]));
  }
  Checks c;
  c.add("mu = 1 dx on [0, 1]", moment_test(w_strip, std::exp(0.5 * strip.du0_plus), 4.0));
  c.add("mu = 2 delta_1", moment_test(w_point, std::exp(0.5 * point.du0_plus), 4.0));
  c.note("Phi'(0+) strip", strip.du0_plus);
  c.note("Phi'(0+) atom", point.du0_plus);
  return {c.finish(ctx), std::nullopt};
}

ExperimentResult ciesielski_taylor(const Context& ctx) {
  const double K = ctx.param("K", 2.0);
  const auto max_steps = static_cast<std::size_t>(ctx.param("cap", 200.0) / ctx.dt);
  const auto occupation = parallel_map(ctx.n, [&](std::size_t i) {
    Rng rng(ctx.stream(1, i));
    const double sd = std::sqrt(ctx.dt);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    double occ = 0.0;
    for (std::size_t k = 0; k < max_steps; ++k) {
      const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
      if (r <= 1.0) occ += ctx.dt;
      if (r >= K) {
        // From radius r the motion returns to the unit ball with probability 1/r.
        if (rng.uniform() >= 1.0 / r) return occ;
        x = {1.0, 0.0, 0.0};
      }
      for (double& c : x) c += sd * rng.normal();
    }
    return -1.0;
  });
  const auto hitting = parallel_map(ctx.n, [&](std::size_t i) {
    Rng rng(ctx.stream(2, i));
    const double sd = std::sqrt(ctx.dt);
    double x = 0.0;
    for (std::size_t k = 0; k < max_steps; ++k) {
      const double y = x + sd * rng.normal();
      const double t = static_cast<double>(k) * ctx.dt;
      if (std::abs(y) >= 1.0) {
        const double level = y > 0.0 ? 1.0 : -1.0;
        return t + ctx.dt * (level - x) / (y - x);
      }
      const double p = 1.0 - (1.0 - bridge_cross_probability(x, y, 1.0, ctx.dt)) *
                                 (1.0 - bridge_cross_probability(x, y, -1.0, ctx.dt));
      if (rng.uniform() < p) return t + 0.5 * ctx.dt;
      x = y;
    }
    return -1.0;
  });
  double caps = 0.0;
  std::vector<double> occ, hit;
  for (std::size_t i = 0; i < ctx.n; ++i) {
    if (occupation[i] < 0.0 || hitting[i] < 0.0) {
      caps += 1.0;
      continue;
    }
    occ.push_back(occupation[i]);
    hit.push_back(hitting[i]);
  }
  Checks c;
  c.add("occupation of BES(3) below 1 vs T_1(|B|)", ks_two_sample(occ, hit));
  const double rate = caps / static_cast<double>(ctx.n);
  c.add("cap-hit rate", tolerance_check(rate, 0.0, 1e-3 - 1e-15));
  c.note("classical pairing", std::string("dimension 3 occupation vs dimension 1 hitting time"));
  return {c.finish(ctx), std::nullopt};
}

ExperimentResult tau_subordinator(const Context& ctx) {
  const double eps = ctx.param("eps", default_epsilon(ctx.dt));
  const double horizon = ctx.param("horizon", 20.0);
  const auto max_steps = static_cast<std::size_t>(horizon / ctx.dt);
  const std::vector<double> taus = parallel_map(ctx.n, [&](std::size_t i) {
    RunningLocalTime run{0.0, eps, 0.0};
    double prev = 0.0;
    const StoppedPath sp = sample_brownian_until(ctx.dt, 0.0, ctx.stream(1, i), max_steps, [&](std::size_t k, double x) {
      if (k > 0) run.advance(prev, ctx.dt);
      prev = x;
      return run.value > 1.0;
    });
    const std::optional<double> tau = inverse_local_time(sp.path, 1.0, eps);
    return tau.value_or(kInf);
  });
  const std::vector<double> lambdas{0.5, 1.0, 2.0};
  Checks c;
  c.add("Laplace grid", laplace_grid_test(taus, [](double lam) { return tau_laplace(1.0, lam); }, lambdas, 4.0, 0.02));
  std::vector<double> w(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) w[i] = std::exp(-taus[i]);
  c.add("E exp(-tau_1) = 0.2431", tolerance_check(mean(w), std::exp(-std::sqrt(2.0)), 0.02));
  return {c.finish(ctx), std::nullopt};
}

ExperimentResult besq_additivity(const Context& ctx) {
  const double a = ctx.param("a", 1.0);
  const TimeGrid grid{a, 1};
  auto endpoint = [&](double delta, double x0, std::uint64_t seed) {
    return sample_besq(delta, x0, grid, seed, BesqMethod::exact).end();
  };
  const auto sums = parallel_map(ctx.n, [&](std::size_t i) {
    return std::array<double, 2>{endpoint(1.0, 0.0, ctx.stream(1, i)) + endpoint(1.0, 0.0, ctx.stream(2, i)),
                                 endpoint(1.0, 0.5, ctx.stream(5, i)) + endpoint(1.0, 0.5, ctx.stream(6, i))};
  });
  const auto direct = parallel_map(ctx.n, [&](std::size_t i) {
    return std::array<double, 2>{endpoint(2.0, 0.0, ctx.stream(3, i)), endpoint(2.0, 1.0, ctx.stream(4, i))};
  });
  const std::vector<double> s0 = column(sums, 0), s1 = column(sums, 1), d0 = column(direct, 0), d1 = column(direct, 1);
  Checks c;
  c.add("Q1_0 + Q1_0 vs Q2_0", ks_two_sample(s0, d0));
  c.add("Q1_0.5 + Q1_0.5 vs Q2_1", ks_two_sample(s1, d1));
  c.add("E Z_a = x0 + delta a", moment_test(d1, 1.0 + 2.0 * a, 4.0));
  c.add("Q2_0 marginal", ks_one_sample(d0, law_catalog("besq_marginal", {2.0, 0.0, a}).cdf));
  return {c.finish(ctx), plot(d0, law_catalog("besq_marginal", {2.0, 0.0, a}).density, "BESQ(2) at a")};
}

ExperimentResult bangbang_marginal(const Context& ctx) {
  const double lambda = ctx.param("lambda", 1.0);
  const double t = ctx.param("t", 1.0);
  const TimeGrid grid = TimeGrid::over(t, ctx.dt);
  const std::vector<double> xs = parallel_map(ctx.n, [&](std::size_t i) {
    return sample_sde([lambda](double x) { return x > 0.0 ? -lambda : (x < 0.0 ? lambda : 0.0); },
                      [](double) { return 1.0; }, 0.0, grid, ctx.stream(1, i))
        .end();
  });
  const Law law = law_catalog("bangbang", {lambda, t});
  Checks c;
  c.add("Euler marginal vs semigroup", ks_one_sample(xs, law.cdf, ctx.bias(0.02)));
  return {c.finish(ctx), plot(xs, law.density, "bang-bang marginal")};
}

std::array<double, 3> stable_ratio_vector(Rng& rng) {
  std::array<double, 3> t{};
  double total = 0.0;
  for (double& v : t) {
    const double z = rng.normal();
    v = 1.0 / (z * z);
    total += v;
  }
  for (double& v : t) v /= total;
  return t;
}

ExperimentResult spider_occupation(const Context& ctx) {
  constexpr int legs = 3;
  TauWalk walk;
  walk.base_dt = ctx.dt;
  walk.scale = ctx.param("scale", 0.1);
  // Leg occupation up to tau_1, a fresh uniform leg for every excursion.
  const auto at_tau = parallel_map(ctx.n, [&](std::size_t i) {
    Rng rng(ctx.stream(1, i));
    Rng labels(ctx.stream(3, i));
    std::array<double, 3> a{};
    int leg = -1;
    double total = 0.0;
    const bool reached = walk_to_local_time(1.0, walk, rng, [&](double x, double y, double, double h) {
      if (leg < 0) leg = static_cast<int>(labels.uniform() * legs);
      const bool up = x > 0.0 || (x == 0.0 && y > 0.0);
      const double keep = up ? positive_fraction(x, y) : 1.0 - positive_fraction(x, y);
      a[static_cast<std::size_t>(leg)] += keep * h;
      if ((y > 0.0) != up) {
        leg = static_cast<int>(labels.uniform() * legs);
        a[static_cast<std::size_t>(leg)] += (1.0 - keep) * h;
      }
      total += h;
    });
    if (!reached) throw Error("spider_occupation: walk stopped before tau_1");
    for (double& v : a) v /= total;
    return a;
  });
  const auto fixed = parallel_map(ctx.n, [&](std::size_t i) {
    const SpiderPath s = sample_spider(legs, TimeGrid::over(1.0, ctx.dt), ctx.stream(4, i));
    std::array<double, 3> a{};
    for (std::size_t k = 0; k + 1 < s.branch.size(); ++k) {
      const int leg = s.branch[k] != 0 ? s.branch[k] : s.branch[k + 1];
      if (leg > 0) a[static_cast<std::size_t>(leg - 1)] += ctx.dt;
    }
    return a;
  });
  const std::vector<double> two_legs = parallel_map(ctx.n, [&](std::size_t i) {
    const SpiderPath s = sample_spider(2, TimeGrid::over(1.0, ctx.dt), ctx.stream(5, i));
    double a = 0.0;
    for (std::size_t k = 0; k + 1 < s.branch.size(); ++k)
      if ((s.branch[k] != 0 ? s.branch[k] : s.branch[k + 1]) == 1) a += ctx.dt;
    return a;
  });
  const auto ref = parallel_map(ctx.n, [&](std::size_t i) {
    Rng rng(ctx.stream(2, i));
    return stable_ratio_vector(rng);
  });
  Checks c;
  for (std::size_t j = 0; j < 2; ++j) {
    std::vector<double> a, b, f;
    for (const auto& r : at_tau) a.push_back(r[j]);
    for (const auto& r : ref) b.push_back(r[j]);
    for (const auto& r : fixed) f.push_back(r[j]);
    c.add("leg " + std::to_string(j + 1) + " at tau_1", ks_two_sample(a, b, ctx.bias(0.02)));
    c.note("leg " + std::to_string(j + 1) + " at t = 1: KS distance", ks_two_sample(f, b, 0.0).statistic);
  }
  const Law arcsine = law_catalog("arcsine");
  c.add("two legs at t = 1 arcsine", ks_one_sample(two_legs, arcsine.cdf, ctx.bias(0.02)));
  return {c.finish(ctx), std::nullopt};
}

}  // namespace

void register_path_experiments(std::vector<Entry>& out) {
  using V = std::vector<std::string>;
  out.push_back({info("local_time_moments", "E[(L^0_1)^2] = E[B_1^2] for the occupation estimator",
                      V{"sample_brownian", "centered_local_time"}, V{"moment_test"}, 50000, 1e-4, 20000, 1e-3, 1.0),
                 local_time_moments});
  out.push_back({info("levy_equivalence", "(S - B, S) has the law of (|B|, L)",
                      V{"sample_brownian", "centered_local_time", "bridge_max"}, V{"ks_two_sample"}, 20000, 1e-4, 4000,
                      1e-3, 2.0),
                 levy_equivalence});
  out.push_back({info("pitman", "2S - B is Bessel(3); S is uniform given 2S - B",
                      V{"sample_brownian", "bridge_max", "law_catalog"}, V{"ks_one_sample", "cdf_bin_test"}, 20000,
                      1e-4, 4000, 1e-3, 1.0),
                 pitman});
  out.push_back({info("pitman_drift", "2S - B with drift vs the diffusion with drift mu coth(mu x)",
                      V{"sample_brownian", "bridge_max"}, V{"ks_two_sample"}, 20000, 1e-4, 3000, 1e-3, 2.0),
                 pitman_drift});
  out.push_back({info("b_gamma_uniform", "B at the first time 2S - B = a is uniform on [-a, a]",
                      V{"bridge_max", "law_catalog"}, V{"ks_one_sample", "moment_test"}, 20000, 1e-4, 4000, 1e-3,
                      0.34),
                 b_gamma_uniform});
  out.push_back({info("arcsine_pair", "last zero and time positive before 1 are arcsine",
                      V{"sample_brownian", "path_functionals"}, V{"ks_one_sample"}, 20000, 1e-4, 4000, 1e-3, 1.0),
                 arcsine_pair});
  out.push_back({info("conditional_sign", "P(B_1 > 0 | A+_1) = A+_1", V{"sample_brownian", "path_functionals"},
                      V{"regression_bin_test"}, 50000, 1e-4, 20000, 1e-3, 1.0),
                 conditional_sign});
  out.push_back({info("bridge_lt_rayleigh", "local time at 0 of the Brownian bridge is Rayleigh",
                      V{"sample_bridge", "centered_local_time"}, V{"ks_one_sample", "moment_test"}, 20000, 1e-4, 4000,
                      1e-3, 1.0),
                 bridge_lt_rayleigh});
  out.push_back({info("trivariate_laplace", "joint Laplace transform of (A+, A-, L) at T_1",
                      V{"bridge_local_time", "trivariate_laplace"}, V{"moment_test"}, 20000, 1e-3, 4000, 2e-3, 15.0),
                 trivariate_transform});
  out.push_back({info("ray_knight_T1", "local times before T_1 form a BESQ(2) in 1 - x",
                      V{"sample_brownian_until", "reflected", "centered_local_time", "sample_besq"},
                      V{"moment_test", "ks_one_sample", "ks_two_sample"}, 10000, 1e-4, 3000, 2.5e-4, 1.0),
                 ray_knight_T1});
  out.push_back({info("ray_knight_tau", "local times at tau_1 are BESQ(0) from 1, independent on both sides",
                      V{"sample_brownian_until", "folded", "bridge_local_time", "centered_local_time"},
                      V{"moment_test", "correlation_test"}, 20000, 1e-4, 3000, 1e-3, 3.0),
                 ray_knight_tau});
  out.push_back({info("ray_knight_functional", "E exp(-1/2 int L^x_tau1 mu(dx)) = exp(Phi'(0+) / 2)",
                      V{"folded", "bridge_local_time", "solve_decreasing"}, V{"moment_test"}, 20000, 2.5e-4, 3000,
                      1e-3, 3.0),
                 ray_knight_functional});
  out.push_back({info("ciesielski_taylor", "occupation of BES(3) below 1 has the law of T_1(|B|)",
                      V{"bridge_cross_probability"}, V{"ks_two_sample"}, 10000, 1e-4, 2000, 1e-3, 4.0),
                 ciesielski_taylor});
  out.push_back({info("tau_subordinator", "inverse local time is stable(1/2): E exp(-lambda tau_1) = exp(-sqrt(2 lambda))",
                      V{"sample_brownian_until", "RunningLocalTime", "inverse_local_time"}, V{"laplace_grid_test"},
                      10000, 1e-4, 2000, 1e-3, 7.0),
                 tau_subordinator});
  out.push_back({info("besq_additivity", "Q^d_x + Q^d'_x' = Q^(d+d')_(x+x')", V{"sample_besq", "law_catalog"},
                      V{"ks_two_sample", "ks_one_sample", "moment_test"}, 100000, 1.0, 20000, 1.0, 1.0),
                 besq_additivity});
  out.push_back({info("bangbang_marginal", "Euler marginal of dX = dB - lambda sgn(X) dt vs the semigroup",
                      V{"sample_sde", "bangbang_semigroup"}, V{"ks_one_sample"}, 20000, 1e-4, 4000, 1e-3, 1.0),
                 bangbang_marginal});
  out.push_back({info("spider_occupation", "leg occupation of a 3-leg spider at tau_1 vs normalized stable(1/2) vector",
                      V{"sample_spider"}, V{"ks_two_sample"}, 20000, 1e-4, 4000, 1e-3, 1.0),
                 spider_occupation});
}

}  // namespace lotex::kit
