// Embeddings, Feynman-Kac resolvents, general diffusions and planar
// self-intersections.

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "experiment_kit.hpp"
#include "lotex/diffusions.hpp"
#include "lotex/intersect2d.hpp"
#include "lotex/parallel.hpp"
#include "lotex/reflaws.hpp"
#include "lotex/skorokhod.hpp"
#include "lotex/sturm.hpp"

namespace lotex::kit {

namespace {

TargetMeasure two_point() { return TargetMeasure::from_atoms({{-1.0, 0.5}, {1.0, 0.5}}); }
TargetMeasure uniform_target() {
  return TargetMeasure::from_quantile([](double p) { return 2.0 * p - 1.0; });
}

std::string label(const std::string& prefix, std::initializer_list<double> values) {
  std::ostringstream s;
  s << prefix << " (";
  bool first = true;
  for (double v : values) {
    s << (first ? "" : ", ") << v;
    first = false;
  }
  s << ")";
  return s.str();
}

ExperimentResult azema_yor(const Context& ctx) {
  const double horizon = ctx.param("horizon", 50.0);
  const std::vector<Embedding> two = azema_yor_sample(two_point(), ctx.n, ctx.dt, ctx.stream(1, 0), horizon);
  const std::vector<Embedding> uni = azema_yor_sample(uniform_target(), ctx.n, ctx.dt, ctx.stream(2, 0), horizon);
  std::vector<double> up, times, b_two, b_uni;
  double caps = 0.0, min_gap = kInf;
  for (const Embedding& e : two) {
    up.push_back(e.B_T > 0.0 ? 1.0 : 0.0);
    times.push_back(e.T);
    b_two.push_back(e.B_T);
    caps += e.capped ? 1.0 : 0.0;
    min_gap = std::min(min_gap, e.S_T - e.B_T);
  }
  for (const Embedding& e : uni) {
    b_uni.push_back(e.B_T);
    caps += e.capped ? 1.0 : 0.0;
    min_gap = std::min(min_gap, e.S_T - e.B_T);
  }
  const Law u = law_catalog("uniform", {-1.0, 1.0});
  Checks c;
  c.add("two-point: P(B_T = 1) = 1/2", moment_test(up, 0.5, 4.0));
  c.add("two-point: E T = 1", relative_mean_test(times, 1.0, 0.05));
  c.add("two-point: E B_T = 0", moment_test(b_two, 0.0, 4.0));
  c.add("uniform: B_T vs Uniform[-1, 1]", ks_one_sample(b_uni, u.cdf, ctx.bias(0.02)));
  c.add("uniform: E B_T = 0", moment_test(b_uni, 0.0, 4.0));
  c.add("capped runs", tolerance_check(caps, 0.0, 0.0));
  c.add("S_T >= B_T", tolerance_check(std::min(min_gap, 0.0), 0.0, 1e-12));
  return {c.finish(ctx), plot(b_uni, u.density, "Azema-Yor embedding of Uniform[-1, 1]")};
}

ExperimentResult supremum_law(const Context& ctx) {
  Checks c;
  c.add("two-point: P(S >= x) = 1 / (1 + x)", supremum_law_check(two_point(), ctx.n, ctx.stream(1, 0), ctx.dt));
  c.add("uniform: quadrature survival", supremum_law_check(uniform_target(), ctx.n, ctx.stream(2, 0), ctx.dt));
  // Moving the upper atom outwards, recentred, enlarges S in law.
  const TargetMeasure wide = TargetMeasure::from_atoms({{-1.0, 2.0 / 3.0}, {2.0, 1.0 / 3.0}});
  double violation = 0.0;
  for (double x = 0.05; x < 1.0; x += 0.05)
    violation = std::max(violation, supremum_survival(two_point(), x) - supremum_survival(wide, x));
  c.add("monotone in the upper atom", tolerance_check(violation, 0.0, 1e-12));
  std::vector<double> closed;
  for (double x : {0.25, 0.5, 0.75}) closed.push_back(std::abs(supremum_survival(two_point(), x) - 1.0 / (1.0 + x)));
  c.add("closed form 1 / (1 + x)", tolerance_check(*std::max_element(closed.begin(), closed.end()), 0.0, 1e-10));
  return {c.finish(ctx), std::nullopt};
}

struct FkCase {
  double k, c;
};

const std::vector<FkCase> kFkCases{{1.0, 1.0}, {0.5, 2.0}, {2.0, 0.5}};

std::function<double(double)> unit_bump(double sigma) {
  return [sigma](double x) { return std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * std::sqrt(2.0 * M_PI)); };
}

PotentialSpec half_line(double c) {
  PotentialSpec p;
  p.f = [c](double x) { return x >= 0.0 ? c : 0.0; };
  p.breakpoints = {0.0};
  return p;
}

ExperimentResult feynman_kac_resolvent(const Context& ctx) {
  const double sigma = ctx.param("bump_sd", 0.25);
  const auto q = unit_bump(sigma);
  Checks c;
  for (std::size_t j = 0; j < kFkCases.size(); ++j) {
    const FkCase& fc = kFkCases[j];
    const PotentialSpec pot = half_line(fc.c);
    const SLSolution sol = solve_feynman_kac(fc.k, pot);
    const double quad = integrate_against(sol, q);
    const ResolventEstimate mc = resolvent_mc(q, fc.k, pot.f, ctx.n, ctx.dt, ctx.stream(1, j));
    TestReport r = tolerance_check(mc.value / quad - 1.0, 0.0, 0.02);
    r.details["monte_carlo"] = mc.value;
    r.details["monte_carlo_se"] = mc.se;
    r.details["quadrature"] = quad;
    c.add(label("(k, c) =", {fc.k, fc.c}), r);
    const double residual = ode_residual(sol, [&](double x) { return 2.0 * (fc.k + pot(x)); }, {0.0});
    c.add(label("ODE residual at (k, c) =", {fc.k, fc.c}), tolerance_check(residual, 0.0, 1e-6));
  }
  const SLSolution free = solve_feynman_kac(0.5, PotentialSpec{});
  c.add("f = 0, k = 1/2: U(1) = exp(-1)", tolerance_check(evaluate(free, 1.0), std::exp(-1.0), 1e-6));
  return {c.finish(ctx), std::nullopt};
}

ExperimentResult feynman_kac_convention(const Context& ctx) {
  const auto q = unit_bump(ctx.param("bump_sd", 0.25));
  std::vector<double> est, se;
  Candidate scaled{"u'' = 2(k + f) u", {}}, literal{"u'' = (k + f) u", {}};
  for (std::size_t j = 0; j < kFkCases.size(); ++j) {
    const FkCase& fc = kFkCases[j];
    const PotentialSpec pot = half_line(fc.c);
    const ResolventEstimate mc = resolvent_mc(q, fc.k, pot.f, ctx.n, ctx.dt, ctx.stream(1, j));
    est.push_back(mc.value);
    se.push_back(mc.se);
    scaled.values.push_back(integrate_against(solve_feynman_kac(fc.k, pot), q));
    literal.values.push_back(integrate_against(solve_feynman_kac(fc.k, pot, true), q));
  }
  Checks c;
  const TestReport verdict = adjudicate(est, se, {scaled, literal}, 4.0, 0.005 * *std::max_element(est.begin(), est.end()));
  c.add("verdict", verdict);
  c.note("verdict", verdict.details.at("verdict"));
  return {c.finish(ctx), std::nullopt};
}

ExperimentResult ou_inverse_lt(const Context& ctx) {
  OuExperimentOptions o;
  o.theta = ctx.param("theta", 1.0);
  o.l = ctx.param("l", 1.0);
  o.n_paths = ctx.n;
  o.dt = ctx.dt;
  o.seed = ctx.stream(1, 0);
  o.horizon = ctx.param("horizon", 200.0);
  TestReport fit = ou_inverse_lt_experiment(o);
  Checks c;
  c.note("verdict", fit.details.at("verdict"));
  c.add("Levy measure candidates", fit);
  // Increments over disjoint local-time intervals.
  const std::size_t n_incr = std::max<std::size_t>(ctx.n / 4, 200);
  const Eigen::ArrayXXd taus = ou_inverse_local_times(o.theta, 0.5 * o.l, 2, n_incr, o.dt, ctx.stream(2, 0), o.horizon);
  std::vector<double> first, second;
  for (Eigen::Index i = 0; i < taus.rows(); ++i) {
    if (!std::isfinite(taus(i, 1))) continue;
    first.push_back(taus(i, 0));
    second.push_back(taus(i, 1) - taus(i, 0));
  }
  // Correlation of exp(-increment).
  for (auto* v : {&first, &second})
    for (double& x : *v) x = std::exp(-x);
  c.add("increments uncorrelated", correlation_test(first, second, 4.0));
  return {c.finish(ctx), std::nullopt};
}

// Bang-bang process run until it leaves (a, b), with Brownian-bridge checks
// for crossings inside a step.
bool hits_lower_first(double lambda, double a, double x0, double b, double dt, Rng& rng, std::size_t max_steps,
                      bool& capped) {
  const double sd = std::sqrt(dt);
  double x = x0;
  for (std::size_t k = 0; k < max_steps; ++k) {
    const double drift = x > 0.0 ? -lambda : (x < 0.0 ? lambda : 0.0);
    const double y = x + drift * dt + sd * rng.normal();
    if (y <= a) return true;
    if (y >= b) return false;
    const double pa = bridge_cross_probability(x, y, a, dt), pb = bridge_cross_probability(x, y, b, dt);
    const double u = rng.uniform();
    if (u < pa) return true;
    if (u < pa + (1.0 - pa) * pb) return false;
    x = y;
  }
  capped = true;
  return false;
}

ExperimentResult scale_hitting(const Context& ctx) {
  Checks c;
  const DiffusionSpec bm = brownian_spec();
  c.add("BM: h(2) = 2", tolerance_check(scale_function(bm, 2.0), 2.0, 1e-6));
  c.add("BM: h(-0.7) = -0.7", tolerance_check(scale_function(bm, -0.7), -0.7, 1e-6));
  c.add("BM: speed density 1", tolerance_check(speed_density(bm, 0.3), 1.0, 1e-12));
  const DiffusionSpec bes3 = bessel_spec(3.0, 1.0);
  c.add("Bessel(3): h(2) = 1/2", tolerance_check(scale_function(bes3, 2.0), 0.5, 1e-6));
  c.add("Bessel(3): h(4) = 3/4", tolerance_check(scale_function(bes3, 4.0), 0.75, 1e-6));
  c.add("Bessel(3): m(2) / m(1) = 4", tolerance_check(speed_density(bes3, 2.0) / speed_density(bes3, 1.0), 4.0, 1e-6));
  double series = 0.0, fact = 1.0;
  for (int k = 0; k < 30; ++k) {
    if (k > 0) fact *= k;
    series += 1.0 / (fact * (2.0 * k + 1.0));
  }
  const DiffusionSpec ou = ou_spec(1.0);
  c.add("OU: h(1) = int_0^1 exp(y^2) dy", tolerance_check(scale_function(ou, 1.0), series, 1e-6));
  c.add("OU: m(1) / m(0) = exp(-1)", tolerance_check(speed_density(ou, 1.0) / speed_density(ou, 0.0), std::exp(-1.0), 1e-6));

  const double lambda = ctx.param("lambda", 1.0);
  const DiffusionSpec bb = bangbang_spec(lambda);
  const auto max_steps = static_cast<std::size_t>(200.0 / ctx.dt);
  struct Case {
    const char* name;
    double lambda, a, x, b;
    double target;
  };
  const double hb1 = scale_function(bb, 1.0), hb2 = scale_function(bb, 2.0), hbm = scale_function(bb, -1.0),
               hb0 = scale_function(bb, 0.0);
  const std::vector<Case> cases{{"BM: P(T_-1 < T_1) = 1/2", 0.0, -1.0, 0.0, 1.0, 0.5},
                                {"bang-bang (a, x, b) = (-1, 0, 1)", lambda, -1.0, 0.0, 1.0, (hb1 - hb0) / (hb1 - hbm)},
                                {"bang-bang (a, x, b) = (-1, 0, 2)", lambda, -1.0, 0.0, 2.0, (hb2 - hb0) / (hb2 - hbm)}};
  double caps = 0.0;
  for (std::size_t j = 0; j < cases.size(); ++j) {
    const Case& cs = cases[j];
    const auto rows = parallel_map(ctx.n, [&](std::size_t i) {
      Rng rng(ctx.stream(10 + j, i));
      bool capped = false;
      const bool low = hits_lower_first(cs.lambda, cs.a, cs.x, cs.b, ctx.dt, rng, max_steps, capped);
      return std::array<double, 2>{low ? 1.0 : 0.0, capped ? 1.0 : 0.0};
    });
    std::vector<double> ind;
    for (const auto& r : rows) {
      ind.push_back(r[0]);
      caps += r[1];
    }
    TestReport r = moment_test(ind, cs.target, 4.0);
    r.details["target"] = cs.target;
    c.add(cs.name, r);
  }
  c.note("capped runs", caps);
  return {c.finish(ctx), std::nullopt};
}

struct CombinedTail {
  Eigen::ArrayXd rate, se, product;
};

CombinedTail height_tail_batches(const DiffusionSpec& spec, const Eigen::ArrayXd& a_grid, double level, double eps,
                                 std::size_t n, std::size_t batch, const std::function<Path(std::size_t)>& make) {
  const Eigen::Index k = a_grid.size();
  Eigen::ArrayXd weighted = Eigen::ArrayXd::Zero(k), var = Eigen::ArrayXd::Zero(k), scale = Eigen::ArrayXd::Zero(k);
  double total_lt = 0.0;
  const std::size_t n_batches = (n + batch - 1) / batch;
  const auto tails = parallel_map(n_batches, [&](std::size_t b) {
    std::vector<Path> paths;
    for (std::size_t i = b * batch; i < std::min(n, (b + 1) * batch); ++i) paths.push_back(make(i));
    return std::make_pair(excursion_height_tail_diffusion(spec, paths, a_grid, level, eps), paths.size());
  });
  for (const auto& [t, size] : tails) {
    const double w = t.local_time * static_cast<double>(size);
    weighted += t.rate * w;
    var += (t.se * w).square();
    total_lt += w;
    scale = t.scale;
  }
  CombinedTail out;
  out.rate = weighted / total_lt;
  out.se = var.sqrt() / total_lt;
  out.product = out.rate * scale;
  return out;
}

void add_tail_checks(Checks& c, const std::string& name, const CombinedTail& t, const Eigen::ArrayXd& a_grid) {
  const double center = t.product.mean();
  double spread = 0.0, rise = 0.0;
  for (Eigen::Index j = 0; j < t.product.size(); ++j) {
    spread = std::max(spread, std::abs(t.product(j) / center - 1.0));
    if (j > 0) rise = std::max(rise, t.rate(j) - t.rate(j - 1));
  }
  TestReport flat = tolerance_check(spread, 0.0, 0.05);
  for (Eigen::Index j = 0; j < a_grid.size(); ++j) {
    std::ostringstream key;
    key << "a = " << a_grid(j);
    flat.details[key.str() + " rate"] = t.rate(j);
    flat.details[key.str() + " se"] = t.se(j);
    flat.details[key.str() + " rate * h"] = t.product(j);
  }
  c.add(name + ": n(M >= a) h(a) constant", flat);
  c.add(name + ": n(M >= a) nonincreasing", tolerance_check(std::max(rise, 0.0), 0.0, 0.0));
  c.note(name + ": fitted constant", center);
}

ExperimentResult diffusion_height_tail(const Context& ctx) {
  const double horizon = ctx.param("horizon", 4.0);
  const TimeGrid grid = TimeGrid::over(horizon, ctx.dt);
  Eigen::ArrayXd a_bm(3), a_bes(3);
  a_bm << 0.2, 0.5, 1.0;
  a_bes << 0.2, 0.5, 1.0;
  Checks c;
  const DiffusionSpec bm = brownian_spec();
  const CombinedTail t_bm = height_tail_batches(bm, a_bm, 0.0, ctx.param("eps", 0.02), ctx.n, 256, [&](std::size_t i) {
    return sample_brownian(grid, 0.0, ctx.stream(1, i));
  });
  add_tail_checks(c, "Brownian motion", t_bm, a_bm);
  const double delta = ctx.param("dimension", 0.5);
  const double level = ctx.param("level", 0.05);
  const DiffusionSpec bes = bessel_spec(delta, 1.0);
  const CombinedTail t_bes = height_tail_batches(bes, a_bes, level, level, ctx.n, 256, [&](std::size_t i) {
    Path p = sample_besq(delta, 0.0, grid, ctx.stream(2, i));
    p.values = p.values.max(0.0).sqrt();
    return p;
  });
  add_tail_checks(c, "Bessel(" + std::to_string(delta).substr(0, 3) + ")", t_bes, a_bes);
  return {c.finish(ctx), std::nullopt};
}

ExperimentResult intersection_mean(const Context& ctx) {
  const auto steps = static_cast<std::size_t>(std::llround(1.0 / ctx.dt));
  const double n_moll = ctx.param("mollifier", 20.0);
  const Eigen::Vector2d y(0.5, 0.0), y_rot(0.0, 0.5);
  const IntersectionSample main = intersection_sample(y, n_moll, 1.0, steps, ctx.n, ctx.stream(1, 0));
  const double target = expected_alpha(y, 1.0);
  Checks c;
  TestReport r = tolerance_check(main.mean / target - 1.0, 0.0, 0.05);
  r.details["mean"] = main.mean;
  r.details["se"] = main.se;
  r.details["quadrature"] = target;
  c.add("E alpha(y, 1) at |y| = 0.5", r);
  const std::size_t side = std::max<std::size_t>(ctx.n / 3, 100);
  const IntersectionSample a = intersection_sample(y, n_moll, 1.0, steps, side, ctx.stream(2, 0));
  const IntersectionSample b = intersection_sample(y_rot, n_moll, 1.0, steps, side, ctx.stream(3, 0));
  const double combined = std::hypot(a.se, b.se);
  TestReport iso = tolerance_check(a.mean - b.mean, 0.0, 4.0 * combined);
  c.add("isotropy", iso);
  const IntersectionSample fine = intersection_sample(y, 2.0 * n_moll, 1.0, steps, side, ctx.stream(2, 0));
  c.add("mollifier scale n vs 2n", tolerance_check(fine.mean - a.mean, 0.0, 2.0 * std::hypot(a.se, fine.se)));
  const Law normal = law_catalog("normal", {target, std::sqrt(ctx.n) * main.se});
  return {c.finish(ctx), plot(main.values, normal.density, "intersection local time at |y| = 0.5")};
}

}  // namespace

void register_model_experiments(std::vector<Entry>& out) {
  using V = std::vector<std::string>;
  out.push_back({info("azema_yor", "stopping at S >= Psi(B) embeds two-point and uniform targets",
                      V{"azema_yor_embed", "hardy_littlewood"}, V{"moment_test", "ks_one_sample"}, 10000, 1e-4, 2000,
                      1e-3, 1.0),
                 azema_yor});
  out.push_back({info("supremum_law", "S at the Azema-Yor time has survival exp(-int dl / (l - Phi(l)))",
                      V{"supremum_law_check", "supremum_survival"}, V{"ks_one_sample"}, 10000, 1e-4, 2000, 1e-3, 1.0),
                 supremum_law});
  out.push_back({info("feynman_kac_resolvent", "Monte Carlo resolvent vs the Sturm-Liouville solution",
                      V{"solve_feynman_kac", "resolvent_mc", "ode_residual"}, V{"std_error"}, 100000, 1e-3, 20000,
                      2e-3, 1.2),
                 feynman_kac_resolvent});
  out.push_back({info("feynman_kac_convention", "generator normalization: u'' = 2(k + f) u or u'' = (k + f) u",
                      V{"solve_feynman_kac", "resolvent_mc"}, V{"mean", "std_error"}, 20000, 1e-3, 5000, 2e-3, 1.2,
                      true),
                 feynman_kac_convention});
  out.push_back({info("ou_inverse_lt", "Levy measure of the Ornstein-Uhlenbeck inverse local time",
                      V{"ou_inverse_lt_experiment", "ou_inverse_local_times"}, V{"std_error", "correlation_test"},
                      10000, 1e-3, 2000, 2e-3, 5.0, true),
                 ou_inverse_lt});
  out.push_back({info("scale_hitting", "scale functions, speed densities and exit probabilities",
                      V{"scale_function", "speed_density"}, V{"moment_test"}, 20000, 2.5e-4, 4000, 1e-3, 3.0),
                 scale_hitting});
  out.push_back({info("diffusion_height_tail", "n(M >= a) proportional to 1 / h(a) for Brownian motion and Bessel(1/2)",
                      V{"excursion_height_tail_diffusion", "sample_besq", "diffusion_local_time"}, V{"mean"},
                      20000, 1e-3, 3000, 2e-3, 8.0),
                 diffusion_height_tail});
  out.push_back({info("intersection_mean", "mean planar self-intersection local time vs its quadrature",
                      V{"intersection_estimate", "expected_alpha"}, V{"std_error"}, 6000, 1.0 / 4096, 600,
                      1.0 / 1024, 1.0),
                 intersection_mean});
}

}  // namespace lotex::kit
