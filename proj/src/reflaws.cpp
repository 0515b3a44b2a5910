#include "lotex/reflaws.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "lotex/paths.hpp"
#include "lotex/quadrature.hpp"
#include "lotex/rng.hpp"

namespace lotex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2Pi = std::sqrt(2.0 * M_PI);

void need(const std::string& name, const std::vector<double>& p, std::size_t n) {
  if (p.size() != n)
    throw Error("law_catalog: " + name + " expects " + std::to_string(n) + " parameter(s), got " +
                std::to_string(p.size()));
}

void positive(const std::string& name, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error("law_catalog: " + name + " parameter must be positive");
}

template <class Draw>
std::function<Eigen::ArrayXd(std::size_t, std::uint64_t)> sampler_of(Draw draw) {
  return [draw](std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::ArrayXd out(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = draw(rng);
    return out;
  };
}

double sinhc(double x) { return std::abs(x) < 1e-8 ? 1.0 + x * x / 6.0 : std::sinh(x) / x; }

// Sums w_j * term(j) over the Poisson(mean) weights, outward from the mode.
template <class Term>
double poisson_mixture(double mean, Term term) {
  if (mean <= 0.0) return term(0);
  const auto mode = static_cast<long>(std::floor(mean));
  const double log_mean = std::log(mean);
  auto weight = [&](long j) {
    return std::exp(-mean + static_cast<double>(j) * log_mean - std::lgamma(static_cast<double>(j) + 1.0));
  };
  double sum = 0.0;
  for (long j = mode;; ++j) {
    const double w = weight(j);
    const double v = w * term(j);
    sum += v;
    if ((w < 1e-14 && v <= 1e-14 * sum) || j > mode + 100000) break;
  }
  for (long j = mode - 1; j >= 0; --j) {
    const double w = weight(j);
    const double v = w * term(j);
    sum += v;
    if (w < 1e-14 && v <= 1e-14 * sum) break;
  }
  return sum;
}

}  // namespace

double noncentral_chi2_density(double x, double k, double nu) {
  if (x <= 0.0) return 0.0;
  return poisson_mixture(0.5 * nu, [&](long j) {
    const double shape = 0.5 * k + static_cast<double>(j);
    if (shape <= 0.0) return 0.0;
    return std::exp((shape - 1.0) * std::log(x) - 0.5 * x - std::lgamma(shape) - shape * std::log(2.0));
  });
}

double noncentral_chi2_cdf(double x, double k, double nu) {
  if (x < 0.0) return 0.0;
  const double v = poisson_mixture(0.5 * nu, [&](long j) {
    const double shape = 0.5 * k + static_cast<double>(j);
    if (shape <= 0.0) return 1.0;
    if (x == 0.0) return 0.0;
    return boost::math::gamma_p(shape, 0.5 * x);
  });
  return std::min(1.0, std::max(0.0, v));
}

std::vector<std::string> law_names() {
  return {"arcsine",         "rayleigh",           "stable_half",      "bes3_marginal",
          "besq_marginal",   "reflected_sup",      "exp",              "normal",
          "uniform",         "longest_excursion_tau", "watanabe_excursion", "watanabe_printed",
          "excursion_local_time", "height_over_level", "bangbang", "excursion_height"};
}

Law law_catalog(const std::string& name, std::vector<double> p) {
  Law law;
  law.name = name;
  law.params = p;
  if (name == "arcsine") {
    need(name, p, 0);
    law.lower = 0.0;
    law.upper = 1.0;
    law.density = [](double x) { return x <= 0.0 || x >= 1.0 ? 0.0 : 1.0 / (M_PI * std::sqrt(x * (1.0 - x))); };
    law.cdf = [](double x) { return x <= 0.0 ? 0.0 : x >= 1.0 ? 1.0 : 2.0 / M_PI * std::asin(std::sqrt(x)); };
    law.laplace = [](double s) { return std::exp(-0.5 * s) * boost::math::cyl_bessel_i(0, 0.5 * s); };
    law.sampler = sampler_of([](Rng& r) {
      const double s = std::sin(0.5 * M_PI * r.uniform());
      return s * s;
    });
  } else if (name == "rayleigh") {
    need(name, p, 0);
    law.lower = 0.0;
    law.density = [](double x) { return x <= 0.0 ? 0.0 : x * std::exp(-0.5 * x * x); };
    law.cdf = [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-0.5 * x * x); };
    law.laplace = [](double s) {
      return 1.0 - s * std::sqrt(0.5 * M_PI) * std::exp(0.5 * s * s) * std::erfc(s / std::sqrt(2.0));
    };
    law.sampler = sampler_of([](Rng& r) { return std::sqrt(-2.0 * std::log(r.uniform_pos())); });
  } else if (name == "stable_half") {
    need(name, p, 1);
    const double l = p[0];
    positive(name, l);
    law.lower = 0.0;
    law.density = [l](double s) {
      return s <= 0.0 ? 0.0 : l * std::exp(-l * l / (2.0 * s)) / std::sqrt(2.0 * M_PI * s * s * s);
    };
    law.cdf = [l](double s) { return s <= 0.0 ? 0.0 : std::erfc(l / std::sqrt(2.0 * s)); };
    law.laplace = [l](double s) { return tau_laplace(l, s); };
    law.sampler = sampler_of([l](Rng& r) {
      const double z = r.normal();
      return l * l / (z * z);
    });
  } else if (name == "bes3_marginal") {
    need(name, p, 1);
    const double t = p[0];
    positive(name, t);
    law.lower = 0.0;
    law.density = [t](double r) {
      return r <= 0.0 ? 0.0 : r * r * std::sqrt(2.0 / (M_PI * t * t * t)) * std::exp(-r * r / (2.0 * t));
    };
    law.cdf = [t](double r) {
      if (r <= 0.0) return 0.0;
      const double z = r / std::sqrt(t);
      return std::erf(z / std::sqrt(2.0)) - std::sqrt(2.0 / M_PI) * z * std::exp(-0.5 * z * z);
    };
    law.sampler = sampler_of([t](Rng& r) {
      const double x = r.normal(), y = r.normal(), z = r.normal();
      return std::sqrt(t * (x * x + y * y + z * z));
    });
  } else if (name == "besq_marginal") {
    need(name, p, 3);
    const double delta = p[0], x0 = p[1], t = p[2];
    if (delta < 0.0 || x0 < 0.0) throw Error("law_catalog: besq_marginal needs delta, x0 >= 0");
    positive(name, t);
    law.lower = 0.0;
    law.density = [=](double z) { return noncentral_chi2_density(z / t, delta, x0 / t) / t; };
    law.cdf = [=](double z) { return noncentral_chi2_cdf(z / t, delta, x0 / t); };
    law.laplace = [=](double s) {
      const double d = 1.0 + 2.0 * s * t;
      return std::pow(d, -0.5 * delta) * std::exp(-s * x0 / d);
    };
    law.sampler = sampler_of([=](Rng& r) {
      const double shape = 0.5 * delta + static_cast<double>(r.poisson(x0 / (2.0 * t)));
      return shape > 0.0 ? 2.0 * t * r.gamma(shape) : 0.0;
    });
  } else if (name == "reflected_sup") {
    need(name, p, 1);
    const double t = p[0];
    positive(name, t);
    const double sd = std::sqrt(t);
    law.lower = 0.0;
    law.density = [sd](double x) { return x < 0.0 ? 0.0 : 2.0 * normal_pdf(x / sd) / sd; };
    law.cdf = [sd](double x) { return x <= 0.0 ? 0.0 : std::erf(x / (sd * std::sqrt(2.0))); };
    law.laplace = [sd](double s) { return 2.0 * std::exp(0.5 * s * s * sd * sd) * normal_sf(s * sd); };
    law.sampler = sampler_of([sd](Rng& r) { return sd * std::abs(r.normal()); });
  } else if (name == "exp") {
    need(name, p, 1);
    const double m = p[0];
    positive(name, m);
    law.lower = 0.0;
    law.density = [m](double x) { return x < 0.0 ? 0.0 : std::exp(-x / m) / m; };
    law.cdf = [m](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x / m); };
    law.laplace = [m](double s) { return 1.0 / (1.0 + m * s); };
    law.sampler = sampler_of([m](Rng& r) { return m * r.exponential(); });
  } else if (name == "normal") {
    need(name, p, 2);
    const double mu = p[0], sigma = p[1];
    positive(name, sigma);
    law.density = [=](double x) { return normal_pdf((x - mu) / sigma) / sigma; };
    law.cdf = [=](double x) { return normal_cdf((x - mu) / sigma); };
    law.sampler = sampler_of([=](Rng& r) { return mu + sigma * r.normal(); });
  } else if (name == "uniform") {
    need(name, p, 2);
    const double a = p[0], b = p[1];
    if (!(b > a)) throw Error("law_catalog: uniform needs a < b");
    law.lower = a;
    law.upper = b;
    law.density = [=](double x) { return x < a || x > b ? 0.0 : 1.0 / (b - a); };
    law.cdf = [=](double x) { return x <= a ? 0.0 : x >= b ? 1.0 : (x - a) / (b - a); };
    law.laplace = [=](double s) {
      if (s == 0.0) return 1.0;
      return (std::exp(-s * a) - std::exp(-s * b)) / (s * (b - a));
    };
    law.sampler = sampler_of([=](Rng& r) { return a + (b - a) * r.uniform(); });
  } else if (name == "longest_excursion_tau") {
    need(name, p, 1);
    const double l = p[0];
    positive(name, l);
    const double c = l * std::sqrt(2.0 / M_PI);
    law.lower = 0.0;
    law.cdf = [c](double a) { return a <= 0.0 ? 0.0 : std::exp(-c / std::sqrt(a)); };
    law.density = [c](double a) { return a <= 0.0 ? 0.0 : std::exp(-c / std::sqrt(a)) * 0.5 * c / (a * std::sqrt(a)); };
    law.sampler = sampler_of([c](Rng& r) {
      const double e = -std::log(r.uniform_pos());
      return e > 0.0 ? c * c / (e * e) : kInf;
    });
  } else if (name == "watanabe_excursion" || name == "watanabe_printed") {
    need(name, p, 1);
    const double l = p[0];
    positive(name, l);
    const double k = name == "watanabe_excursion" ? 0.5 * l : 2.0 * l;
    law.lower = 0.0;
    law.cdf = [k](double x) { return x <= 0.0 ? 0.0 : std::exp(-k / x); };
    law.density = [k](double x) { return x <= 0.0 ? 0.0 : std::exp(-k / x) * k / (x * x); };
    law.sampler = sampler_of([k](Rng& r) {
      const double e = -std::log(r.uniform_pos());
      return e > 0.0 ? k / e : kInf;
    });
  } else if (name == "excursion_local_time") {
    need(name, p, 1);
    positive(name, p[0]);
    Law e = law_catalog("exp", {2.0 * p[0]});
    e.name = name;
    e.params = p;
    return e;
  } else if (name == "height_over_level") {
    need(name, p, 1);
    const double c = p[0];
    positive(name, c);
    law.lower = c;
    law.density = [c](double x) { return x < c ? 0.0 : c / (x * x); };
    law.cdf = [c](double x) { return x <= c ? 0.0 : 1.0 - c / x; };
    law.sampler = sampler_of([c](Rng& r) { return c / r.uniform_pos(); });
  } else if (name == "bangbang") {
    need(name, p, 2);
    const double lambda = p[0], t = p[1];
    if (lambda < 0.0) throw Error("law_catalog: bangbang needs lambda >= 0");
    positive(name, t);
    law.density = [=](double y) { return bangbang_semigroup(lambda, t, 0.0, y); };
    law.cdf = [=](double y) {
      const double d = std::abs(y), st = std::sqrt(t);
      const double tail = 0.5 * (normal_sf((d + lambda * t) / st) + std::exp(-2.0 * lambda * d) * normal_sf((d - lambda * t) / st));
      return y >= 0.0 ? 1.0 - tail : tail;
    };
  } else if (name == "excursion_height") {
    law.lower = 0.0;
    law.cdf = [](double x) {
      if (x <= 0.1) return 0.0;
      double s = 1.0;
      for (int k = 1; k <= 200; ++k) {
        const double kx = static_cast<double>(k * k) * x * x;
        s += 2.0 * (1.0 - 4.0 * kx) * std::exp(-2.0 * kx);
      }
      return std::clamp(s, 0.0, 1.0);
    };
    law.density = [](double x) {
      if (x <= 0.1) return 0.0;
      double s = 0.0;
      for (int k = 1; k <= 200; ++k) {
        const double k2 = static_cast<double>(k * k);
        s += 8.0 * k2 * x * (4.0 * k2 * x * x - 3.0) * std::exp(-2.0 * k2 * x * x);
      }
      return std::max(s, 0.0);
    };
  } else {
    throw Error("law_catalog: unknown law '" + name + "'");
  }
  return law;
}

double reflection_joint_density(double t, double a, double b) {
  if (!(t > 0.0)) throw Error("reflection_joint_density: t must be positive");
  if (a < 0.0 || b > a) return 0.0;
  const double r = 2.0 * a - b;
  return 2.0 * r / std::sqrt(2.0 * M_PI * t * t * t) * std::exp(-r * r / (2.0 * t));
}

double triple_density(double t, double s, double l, double x) {
  if (!(t > 0.0)) throw Error("triple_density: t must be positive");
  if (l < 0.0 || s <= 0.0 || s >= t) return 0.0;
  const double u = t - s;
  return l / std::sqrt(2.0 * M_PI * s * s * s) * std::exp(-l * l / (2.0 * s)) * std::abs(x) /
         std::sqrt(2.0 * M_PI * u * u * u) * std::exp(-x * x / (2.0 * u));
}

double bangbang_semigroup(double lambda, double t, double x, double y) {
  if (lambda < 0.0 || !(t > 0.0)) throw Error("bangbang_semigroup: needs lambda >= 0 and t > 0");
  const double d = std::abs(y - x);
  const double st = std::sqrt(t);
  const double g = std::exp(-(d + lambda * t) * (d + lambda * t) / (2.0 * t)) / (kSqrt2Pi * st);
  if (lambda == 0.0) return g;
  return g + lambda * std::exp(-2.0 * lambda * d) * normal_sf((d - lambda * t) / st);
}

double tau_laplace(double l, double lambda) { return std::exp(-l * std::sqrt(2.0 * lambda)); }

double bes3_hit_laplace(double lambda) { return 1.0 / sinhc(lambda); }

double knight_laplace(double mu) { return 1.0 / sinhc(2.0 * mu); }

double trivariate_laplace(double lambda, double mu, double alpha) {
  return 1.0 / (std::cosh(lambda) + (mu + 2.0 * alpha) * sinhc(lambda));
}

double excursion_lt_levy(double x, double y) {
  if (!(x > 0.0)) throw Error("excursion_lt_levy: level must be positive");
  return y < 0.0 ? 0.0 : std::exp(-y / (2.0 * x)) / (4.0 * x * x);
}

double coth_functional(double l, double mu, double a, bool halved) {
  if (!(a > 0.0)) throw Error("coth_functional: level must be positive");
  const double rate = std::abs(mu * a) < 1e-8 ? 1.0 / a : mu / std::tanh(mu * a);
  return std::exp(-(halved ? 0.5 : 1.0) * l * rate);
}

double transform(const std::string& name, std::span<const double> args) {
  auto arity = [&](std::size_t n) {
    if (args.size() != n) throw Error("transform: " + name + " expects " + std::to_string(n) + " argument(s)");
  };
  if (name == "tau_laplace") {
    arity(2);
    return tau_laplace(args[0], args[1]);
  }
  if (name == "bes3_hit_laplace") {
    arity(1);
    return bes3_hit_laplace(args[0]);
  }
  if (name == "knight_laplace") {
    arity(1);
    return knight_laplace(args[0]);
  }
  if (name == "trivariate") {
    arity(3);
    return trivariate_laplace(args[0], args[1], args[2]);
  }
  if (name == "excursion_lt_levy") {
    arity(2);
    return excursion_lt_levy(args[0], args[1]);
  }
  if (name == "coth_halved" || name == "coth_printed") {
    arity(3);
    return coth_functional(args[0], args[1], args[2], name == "coth_halved");
  }
  throw Error("transform: unknown transform '" + name + "'");
}

}  // namespace lotex
