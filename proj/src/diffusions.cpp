#include "lotex/diffusions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lotex/localtime.hpp"
#include "lotex/parallel.hpp"
#include "lotex/quadrature.hpp"

namespace lotex {

namespace {

constexpr double kSiegmund = 0.5825971579390106;  // -zeta(1/2) / sqrt(2 pi)

std::string where(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

}  // namespace

DiffusionSpec brownian_spec() {
  return {"brownian", [](double) { return 0.0; }, [](double) { return 1.0; }};
}

DiffusionSpec ou_spec(double theta) {
  return {"ou", [theta](double x) { return -theta * x; }, [](double) { return 1.0; }};
}

DiffusionSpec bessel_spec(double dimension, double base_point) {
  DiffusionSpec s{"bessel", [dimension](double x) { return (dimension - 1.0) / (2.0 * x); },
                  [](double) { return 1.0; }};
  s.lower = 0.0;
  s.base_point = base_point;
  return s;
}

DiffusionSpec bangbang_spec(double lambda) {
  return {"bangbang", [lambda](double x) { return x > 0.0 ? -lambda : x < 0.0 ? lambda : 0.0; },
          [](double) { return 1.0; }};
}

double scale_derivative(const DiffusionSpec& spec, double x) {
  const double x0 = spec.base_point;
  if (!spec.contains(x0)) throw Error("scale_derivative: base point " + where(x0) + " is a singular point of the drift");
  if (!spec.contains(x) && x != x0) throw Error("scale_derivative: " + where(x) + " lies outside the domain");
  const RealFn ratio = [&](double z) {
    const double s = spec.sigma(z);
    return 2.0 * spec.drift(z) / (s * s);
  };
  const double inner = integrate(ratio, x0, x, 1e-12 * std::max(1.0, std::abs(x - x0)));
  const double v = std::exp(-inner);
  if (!std::isfinite(inner) || !std::isfinite(v) || v <= 0.0)
    throw Error("scale_derivative: inner integral diverges between " + where(x0) + " and " + where(x));
  return v;
}

double scale_function(const DiffusionSpec& spec, double x) {
  const RealFn dh = [&](double y) { return scale_derivative(spec, y); };
  const double v = integrate(dh, spec.base_point, x, 1e-10 * std::max(1.0, std::abs(x - spec.base_point)));
  if (!std::isfinite(v)) throw Error("scale_function: integral diverges towards " + where(x));
  return v;
}

double speed_density(const DiffusionSpec& spec, double x) {
  const double s = spec.sigma(x);
  return 1.0 / (scale_derivative(spec, x) * s * s);
}

double ScaleTable::operator()(double at) const {
  const Eigen::Index n = x.size();
  if (at <= x(0)) return h(0) + dh(0) * (at - x(0));
  if (at >= x(n - 1)) return h(n - 1) + dh(n - 1) * (at - x(n - 1));
  const auto it = std::upper_bound(x.data(), x.data() + n, at);
  const Eigen::Index j = (it - x.data()) - 1;
  const double w = (at - x(j)) / (x(j + 1) - x(j));
  return (1.0 - w) * h(j) + w * h(j + 1);
}

ScaleTable tabulate(const DiffusionSpec& spec, double lo, double hi, std::size_t points) {
  if (points < 2 || !(hi > lo)) throw Error("tabulate: need hi > lo and at least two points");
  ScaleTable t;
  t.x = Eigen::ArrayXd::LinSpaced(static_cast<Eigen::Index>(points), lo, hi);
  t.h.resize(t.x.size());
  t.dh.resize(t.x.size());
  for (Eigen::Index i = 0; i < t.x.size(); ++i)
    if (!spec.contains(t.x(i))) throw Error("tabulate: " + where(t.x(i)) + " lies outside the domain");
  const RealFn ratio = [&](double z) {
    const double s = spec.sigma(z);
    return 2.0 * spec.drift(z) / (s * s);
  };
  // Anchor at the node nearest the base point, then accumulate interval by interval.
  const double spacing = (hi - lo) / static_cast<double>(points - 1);
  const auto j0 = static_cast<Eigen::Index>(
      std::clamp(std::round((spec.base_point - lo) / spacing), 0.0, static_cast<double>(points - 1)));
  t.dh(j0) = scale_derivative(spec, t.x(j0));
  t.h(j0) = scale_function(spec, t.x(j0));
  const auto advance = [&](Eigen::Index from, Eigen::Index to) {
    const double a = t.x(from), b = t.x(to), d0 = t.dh(from);
    const RealFn local = [&](double y) { return d0 * std::exp(-integrate(ratio, a, y, 1e-12)); };
    t.dh(to) = d0 * std::exp(-integrate(ratio, a, b, 1e-12));
    t.h(to) = t.h(from) + integrate(local, a, b, 1e-12 * std::max(1.0, d0));
    if (!std::isfinite(t.dh(to)) || !(t.dh(to) > 0.0) || !std::isfinite(t.h(to)))
      throw Error("tabulate: scale function diverges between " + where(a) + " and " + where(b));
  };
  for (Eigen::Index i = j0 + 1; i < t.x.size(); ++i) advance(i - 1, i);
  for (Eigen::Index i = j0 - 1; i >= 0; --i) advance(i + 1, i);
  for (Eigen::Index i = 1; i < t.x.size(); ++i)
    if (!(t.h(i) > t.h(i - 1))) throw Error("tabulate: scale function not strictly increasing");
  return t;
}

double diffusion_local_time(PathView path, const DiffusionSpec& spec, double x, double eps) {
  if (!(eps > 0.0)) throw Error("diffusion_local_time: window width must be positive");
  if (!(x >= spec.lower && x + eps <= spec.upper) || (x == spec.lower && !std::isfinite(spec.lower)))
    throw Error("diffusion_local_time: window lies outside the domain");
  const double occupation = occupation_local_time(path, x, path.horizon(), eps) * eps;
  const RealFn m = [&](double y) { return speed_density(spec, y); };
  const double mass = integrate(m, std::max(x, spec.lower), x + eps, 1e-10 * eps);
  return occupation / mass;
}

HeightTail excursion_height_tail_diffusion(const DiffusionSpec& spec, const std::vector<Path>& paths,
                                           const Eigen::ArrayXd& a_grid, double level, double eps) {
  if (paths.empty()) throw Error("excursion_height_tail_diffusion: no paths");
  const Eigen::Index k = a_grid.size();
  const double dt = paths.front().grid.step;
  const double low = level + kSiegmund * spec.sigma(level) * std::sqrt(dt);
  Eigen::ArrayXd high(k);
  for (Eigen::Index j = 0; j < k; ++j) high(j) = a_grid(j) - kSiegmund * spec.sigma(a_grid(j)) * std::sqrt(dt);

  Eigen::ArrayXXd counts = Eigen::ArrayXXd::Zero(static_cast<Eigen::Index>(paths.size()), k);
  Eigen::ArrayXd lt(static_cast<Eigen::Index>(paths.size()));
  const RealFn m = [&](double y) { return speed_density(spec, y); };
  const double lo_edge = std::max(level - 0.5 * eps, spec.lower);
  const double mass = integrate(m, lo_edge, level + 0.5 * eps, 1e-12);
  const double top = k > 0 ? a_grid.maxCoeff() : level;
  const ScaleTable h = tabulate(spec, level, std::max(top, level + eps), 257);
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const Path& path = paths[p];
    std::vector<char> armed(static_cast<std::size_t>(k), path.values(0) <= low ? 1 : 0);
    for (Eigen::Index i = 1; i < path.values.size(); ++i) {
      const double x = path.values(i);
      if (x <= low) {
        std::fill(armed.begin(), armed.end(), 1);
        continue;
      }
      for (Eigen::Index j = 0; j < k; ++j) {
        if (armed[static_cast<std::size_t>(j)] && x >= high(j)) {
          counts(static_cast<Eigen::Index>(p), j) += 1.0;
          armed[static_cast<std::size_t>(j)] = 0;
        }
      }
    }
    // The excursion in progress at the horizon counts with its chance of reaching a first.
    const double last = path.values(path.values.size() - 1);
    if (last > low) {
      for (Eigen::Index j = 0; j < k; ++j) {
        if (!armed[static_cast<std::size_t>(j)]) continue;
        const double reach = (h(last) - h(level)) / (h(a_grid(j)) - h(level));
        counts(static_cast<Eigen::Index>(p), j) += std::clamp(reach, 0.0, 1.0);
      }
    }
    lt(static_cast<Eigen::Index>(p)) =
        occupation_local_time(path, lo_edge, path.grid.horizon(), level + 0.5 * eps - lo_edge) *
        (level + 0.5 * eps - lo_edge) / mass;
  }

  HeightTail out;
  out.a = a_grid;
  out.rate.resize(k);
  out.se.resize(k);
  out.scale.resize(k);
  const double mean_l = lt.mean();
  if (!(mean_l > 0.0)) throw Error("excursion_height_tail_diffusion: no local time accumulated at the level");
  out.local_time = mean_l;
  const auto n = static_cast<double>(paths.size());
  const double h_level = scale_function(spec, level);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double rate = counts.col(j).mean() / mean_l;
    const Eigen::ArrayXd resid = counts.col(j) - rate * lt;
    out.rate(j) = rate;
    out.se(j) = std::sqrt(resid.square().sum() / std::max(1.0, n - 1.0) / n) / mean_l;
    out.scale(j) = scale_function(spec, a_grid(j)) - h_level;
  }
  out.product = out.rate * out.scale;
  if (k > 0) {
    const double top = a_grid.maxCoeff();
    const double far = level + 100.0 * (top - level);
    if (spec.contains(far)) {
      try {
        out.transient_suspect = scale_function(spec, far) - h_level < 20.0 * (scale_function(spec, top) - h_level);
      } catch (const Error&) {
        out.transient_suspect = false;
      }
    }
  }
  return out;
}

double ou_levy_density(int candidate, double theta, double v) {
  if (v <= 0.0) return 0.0;
  const double base = 1.0 / std::sqrt(2.0 * M_PI * v * v * v);
  const double tv = theta * v;
  // (tv / sinh tv)^{3/2} written with decaying exponentials.
  const double area = tv < 1e-6 ? 1.0 : std::pow(2.0 * tv * std::exp(-tv) / -std::expm1(-2.0 * tv), 1.5);
  switch (candidate) {
    case 0: return std::exp(-0.5 * tv) * base;
    case 1: return std::exp(-0.5 * tv) * area * base;
    case 2: return std::exp(0.5 * tv) * area * base;
    default: throw Error("ou_levy_density: candidate must be 0, 1 or 2");
  }
}

double ou_laplace_exponent(int candidate, double theta, double mu) {
  // v = w^2 removes the v^{-1/2} singularity at the origin.
  const RealFn f = [&](double w) {
    const double v = w * w;
    if (v == 0.0) return 2.0 * mu / std::sqrt(2.0 * M_PI);
    return 2.0 * w * -std::expm1(-mu * v) * ou_levy_density(candidate, theta, v);
  };
  return integrate_to_infinity(f, 0.0, 1e-10);
}

double ou_exact_exponent(double theta, double mu) {
  const RealFn f = [&](double w) {
    const double t = w * w;
    const double var = theta > 0.0 ? (t == 0.0 ? 0.0 : -std::expm1(-2.0 * theta * t) / (2.0 * theta)) : t;
    if (t == 0.0) return 2.0 / std::sqrt(2.0 * M_PI);
    return 2.0 * w * std::exp(-mu * t) / std::sqrt(2.0 * M_PI * var);
  };
  return 1.0 / integrate_to_infinity(f, 0.0, 1e-10);
}

Eigen::ArrayXXd ou_inverse_local_times(double theta, double l, std::size_t levels, std::size_t n_paths,
                                       double dt, std::uint64_t seed, double horizon) {
  if (!(l > 0.0) || levels == 0) throw Error("ou_inverse_local_times: need l > 0 and at least one level");
  const double decay = std::exp(-theta * dt);
  const double sd = theta > 0.0 ? std::sqrt(-std::expm1(-2.0 * theta * dt) / (2.0 * theta)) : std::sqrt(dt);
  const auto max_steps = static_cast<std::size_t>(std::ceil(horizon / dt));
  const auto rows = parallel_map(n_paths, [&](std::size_t i) {
    Rng rng(mix_seed(seed, i));
    std::vector<double> taus(levels, std::numeric_limits<double>::infinity());
    double x = 0.0, lt = 0.0;
    std::size_t next = 0;
    for (std::size_t step = 1; step <= max_steps && next < levels; ++step) {
      const double y = decay * x + sd * rng.normal();
      if (!bridge_misses(x, y, dt)) lt += bridge_local_time(x, y, dt, rng.uniform_pos());
      x = y;
      while (next < levels && lt > l * static_cast<double>(next + 1)) taus[next++] = static_cast<double>(step) * dt;
    }
    return taus;
  });
  Eigen::ArrayXXd out(static_cast<Eigen::Index>(n_paths), static_cast<Eigen::Index>(levels));
  for (std::size_t i = 0; i < n_paths; ++i)
    for (std::size_t j = 0; j < levels; ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return out;
}

TestReport ou_inverse_lt_experiment(const OuExperimentOptions& o) {
  const Eigen::ArrayXXd taus = ou_inverse_local_times(o.theta, o.l, 1, o.n_paths, o.dt, o.seed, o.horizon);
  std::vector<double> tau(taus.data(), taus.data() + taus.rows());
  const double q = bonferroni_multiplier(4.0, o.mu_grid.size());
  TestReport r;
  r.n_paths = o.n_paths;
  r.dt = o.dt;
  r.seed = o.seed;
  std::size_t censored = 0;
  for (double t : tau) censored += std::isfinite(t) ? 0 : 1;
  r.details["censored"] = static_cast<double>(censored);
  r.details["theta"] = o.theta;
  r.details["l"] = o.l;

  static const char* names[] = {"plain", "area_paper_sign", "area_reverting_sign"};
  double best = std::numeric_limits<double>::infinity();
  std::string fits;
  std::vector<double> w(tau.size());
  std::vector<double> worst(3, 0.0);
  for (double mu : o.mu_grid) {
    for (std::size_t i = 0; i < tau.size(); ++i) w[i] = std::exp(-mu * tau[i]);
    const double m = mean(w);
    const double se = std_error(w);
    const std::string key = "mu=" + where(mu);
    r.details[key + " empirical"] = m;
    r.details[key + " se"] = se;
    r.details[key + " exact_resolvent"] = std::exp(-o.l * ou_exact_exponent(o.theta, mu));
    for (int c = 0; c < 3; ++c) {
      const double target = std::exp(-o.l * ou_laplace_exponent(c, o.theta, mu));
      const double z = (m - target) / se;
      r.details[key + " " + names[c]] = target;
      r.details[key + " z " + names[c]] = z;
      worst[static_cast<std::size_t>(c)] = std::max(worst[static_cast<std::size_t>(c)], std::abs(z));
    }
  }
  for (int c = 0; c < 3; ++c) {
    const double wc = worst[static_cast<std::size_t>(c)];
    best = std::min(best, wc);
    if (wc <= q) fits += fits.empty() ? names[c] : std::string(",") + names[c];
  }
  r.statistic = best;
  r.passed = !fits.empty();
  r.details["verdict"] = fits.empty() ? std::string("none") : fits;
  r.details["multiplier"] = q;
  return r;
}

}  // namespace lotex
