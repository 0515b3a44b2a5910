#include "lotex/skorokhod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lotex/parallel.hpp"
#include "lotex/paths.hpp"
#include "lotex/quadrature.hpp"
#include "lotex/rng.hpp"

namespace lotex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Index of the first entry of `v` strictly greater than `l`.
Eigen::Index first_above(const Eigen::ArrayXd& v, double l) {
  return std::upper_bound(v.data(), v.data() + v.size(), l) - v.data();
}

}  // namespace

double TargetMeasure::top() const {
  if (is_discrete()) return atoms.back().first;
  return quantile_nodes(quantile_nodes.size() - 1);
}

double TargetMeasure::bottom() const {
  if (is_discrete()) return atoms.front().first;
  return quantile_nodes(0);
}

TargetMeasure TargetMeasure::from_atoms(std::vector<std::pair<double, double>> atoms) {
  if (atoms.empty()) throw Error("TargetMeasure: no atoms");
  std::sort(atoms.begin(), atoms.end());
  double total = 0.0, m = 0.0, m2 = 0.0;
  for (const auto& [y, p] : atoms) {
    if (!std::isfinite(y) || !(p > 0.0)) throw Error("TargetMeasure: atoms need finite values and positive mass");
    total += p;
    m += p * y;
    m2 += p * y * y;
  }
  for (std::size_t i = 1; i < atoms.size(); ++i)
    if (atoms[i].first == atoms[i - 1].first) throw Error("TargetMeasure: repeated atom");
  if (std::abs(total - 1.0) > 1e-12) throw Error("TargetMeasure: probabilities must sum to 1");
  if (std::abs(m) > 1e-10) throw Error("TargetMeasure: measure must be centered");

  TargetMeasure mu;
  mu.atoms = std::move(atoms);
  mu.mean = m;
  mu.variance = m2 - m * m;
  const auto k = static_cast<Eigen::Index>(mu.atoms.size());
  mu.psi_nodes.resize(k);
  double mass = 0.0, first = 0.0;
  for (Eigen::Index i = k - 1; i >= 0; --i) {
    const auto& [y, p] = mu.atoms[static_cast<std::size_t>(i)];
    mass += p;
    first += p * y;
    mu.psi_nodes(i) = first / mass;
  }
  return mu;
}

TargetMeasure TargetMeasure::from_quantile(const std::function<double(double)>& quantile, std::size_t nodes) {
  if (nodes < 2) throw Error("TargetMeasure: need at least two quantile nodes");
  const auto M = static_cast<Eigen::Index>(nodes);
  const double h = 1.0 / static_cast<double>(nodes);
  TargetMeasure mu;
  mu.quantile_nodes.resize(M + 1);
  for (Eigen::Index j = 0; j <= M; ++j) {
    mu.quantile_nodes(j) = quantile(static_cast<double>(j) * h);
    if (!std::isfinite(mu.quantile_nodes(j))) throw Error("TargetMeasure: quantile must be finite on [0, 1]");
    if (j > 0 && mu.quantile_nodes(j) < mu.quantile_nodes(j - 1))
      throw Error("TargetMeasure: quantile must be nondecreasing");
  }
  const Eigen::ArrayXd& q = mu.quantile_nodes;
  // Tail integrals of the piecewise-linear quantile.
  mu.psi_nodes.resize(M + 1);
  double tail = 0.0, tail2 = 0.0;
  mu.psi_nodes(M) = q(M);
  for (Eigen::Index j = M - 1; j >= 0; --j) {
    const double a = q(j), b = q(j + 1);
    tail += 0.5 * h * (a + b);
    tail2 += h * (a * a + a * b + b * b) / 3.0;
    mu.psi_nodes(j) = tail / (1.0 - static_cast<double>(j) * h);
  }
  const double spread = std::max(1.0, q(M) - q(0));
  if (std::abs(tail) > 1e-10 * spread) throw Error("TargetMeasure: measure must be centered");
  mu.mean = tail;
  mu.variance = tail2 - tail * tail;
  return mu;
}

double hardy_littlewood(const TargetMeasure& mu, double x) {
  if (x > mu.top()) return kInf;
  if (mu.is_discrete()) {
    const auto it = std::lower_bound(mu.atoms.begin(), mu.atoms.end(), x,
                                     [](const std::pair<double, double>& a, double v) { return a.first < v; });
    return mu.psi_nodes(it - mu.atoms.begin());
  }
  const Eigen::ArrayXd& q = mu.quantile_nodes;
  const Eigen::Index M = q.size() - 1;
  if (x <= q(0)) return mu.psi_nodes(0);
  // Segment with q(j) < x <= q(j + 1).
  const Eigen::Index j = (std::lower_bound(q.data(), q.data() + q.size(), x) - q.data()) - 1;
  const double h = 1.0 / static_cast<double>(M);
  const double pj = static_cast<double>(j) * h;
  const double p0 = pj + (x - q(j)) / (q(j + 1) - q(j)) * h;
  const double rest = 1.0 - static_cast<double>(j + 1) * h;
  const double tail = 0.5 * (pj + h - p0) * (x + q(j + 1)) + mu.psi_nodes(j + 1) * rest;
  if (1.0 - p0 < 1e-15) return mu.top();
  return tail / (1.0 - p0);
}

double hardy_littlewood_inverse(const TargetMeasure& mu, double l) {
  const Eigen::ArrayXd& psi = mu.psi_nodes;
  const Eigen::Index k = first_above(psi, l);
  if (mu.is_discrete()) {
    const Eigen::Index i = std::clamp<Eigen::Index>(k - 1, 0, psi.size() - 1);
    return mu.atoms[static_cast<std::size_t>(i)].first;
  }
  const Eigen::ArrayXd& q = mu.quantile_nodes;
  if (k == 0) return q(0);
  if (k >= psi.size()) return mu.top();
  return q(k - 1) + (l - psi(k - 1)) / (psi(k) - psi(k - 1)) * (q(k) - q(k - 1));
}

double supremum_survival(const TargetMeasure& mu, double x) {
  if (x <= 0.0) return 1.0;
  if (x > mu.top()) return 0.0;
  if (mu.is_discrete()) {
    const Eigen::ArrayXd& psi = mu.psi_nodes;
    double log_s = 0.0;
    for (Eigen::Index k = 0; k + 1 < psi.size() && psi(k) < x; ++k) {
      const double c = mu.atoms[static_cast<std::size_t>(k)].first;
      const double hi = std::min(x, psi(k + 1));
      log_s -= std::log((hi - c) / (psi(k) - c));
    }
    return std::exp(log_s);
  }
  if (x >= mu.top()) return 0.0;
  const double integral = integrate([&](double l) { return 1.0 / (l - hardy_littlewood_inverse(mu, l)); }, 0.0, x, 1e-10);
  return std::exp(-integral);
}

Embedding azema_yor_embed(const TargetMeasure& mu, double dt, std::uint64_t seed, double horizon, int max_doublings) {
  if (!(dt > 0.0) || !(horizon > 0.0)) throw Error("azema_yor_embed: need dt > 0 and horizon > 0");
  Rng rng(seed);
  const double top = mu.top();
  const double sd = std::sqrt(dt);
  double b = 0.0, s = 0.0, t = 0.0;
  double level = hardy_littlewood_inverse(mu, 0.0);
  double limit = horizon;
  int doublings = 0;
  for (;;) {
    while (t < limit) {
      const double a = b;
      b = a + sd * rng.normal();
      const double peak = bridge_max(a, b, dt, rng.uniform_pos());
      if (peak >= top) {
        // The running maximum reaches the top of the support, where the
        // constraint holds with B = S.
        return {top, top, t + 0.5 * dt, false};
      }
      if (peak > s) {
        s = peak;
        level = hardy_littlewood_inverse(mu, s);
      }
      if (b <= level) {
        const double theta = a > level ? (a - level) / (a - b) : 0.0;
        return {level, s, t + theta * dt, false};
      }
      if (a > level && rng.uniform() < bridge_cross_probability(a, b, level, dt)) return {level, s, t + 0.5 * dt, false};
      t += dt;
    }
    if (doublings >= max_doublings) return {b, s, t, true};
    limit *= 2.0;
    ++doublings;
  }
}

std::vector<Embedding> azema_yor_sample(const TargetMeasure& mu, std::size_t n, double dt, std::uint64_t seed,
                                        double horizon) {
  return parallel_map(n, [&](std::size_t i) { return azema_yor_embed(mu, dt, mix_seed(seed, i), horizon); });
}

TestReport supremum_law_check(const TargetMeasure& mu, std::size_t n, std::uint64_t seed, double dt) {
  const std::vector<Embedding> runs = azema_yor_sample(mu, n, dt, seed);
  std::vector<double> sup;
  sup.reserve(runs.size());
  double caps = 0.0, gap = kInf;
  for (const Embedding& e : runs) {
    sup.push_back(e.S_T);
    caps += e.capped ? 1.0 : 0.0;
    gap = std::min(gap, e.S_T - e.B_T);
  }
  TestReport r = ks_one_sample(
      sup, [&](double x) { return 1.0 - supremum_survival(mu, std::nextafter(x, kInf)); }, 0.02);
  r.experiment = "supremum_law";
  r.n_paths = n;
  r.dt = dt;
  r.seed = seed;
  r.passed = r.passed && caps == 0.0 && gap >= 0.0;
  r.details["cap_hits"] = caps;
  r.details["min_S_minus_B"] = gap;
  return r;
}

}  // namespace lotex
