#include "lotex/sturm.hpp"

#include <algorithm>
#include <cmath>

#include "lotex/parallel.hpp"
#include "lotex/paths.hpp"

namespace lotex {

namespace {

using Rate = std::function<double(double)>;

struct HalfLine {
  std::vector<double> x;  // ascending from 0
  std::vector<double> w;  // u'/u
  std::vector<double> s;  // log u up to a constant
};

// Integrates (w, s)' = (rate - w^2, w) backward from X to 0 with fixed-step RK4
// on every segment between consecutive knots. Crossing an atom at a leftwards
// applies w(a-) = w(a+) - mass.
HalfLine riccati(const Rate& rate, const std::vector<std::pair<double, double>>& atoms,
                 const std::vector<double>& breakpoints, double X, double h) {
  std::vector<double> knots{0.0, X};
  for (const auto& [a, m] : atoms)
    if (a > 0.0 && a < X) knots.push_back(a);
  for (double b : breakpoints)
    if (b > 0.0 && b < X) knots.push_back(b);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  HalfLine out;
  const double tail = rate(X * (1.0 - 1e-12));
  if (tail < 0.0) throw Error("riccati: negative potential");
  double w = -std::sqrt(tail);
  double s = 0.0;
  out.x.push_back(X);
  out.w.push_back(w);
  out.s.push_back(s);
  for (std::size_t seg = knots.size() - 1; seg > 0; --seg) {
    const double hi = knots[seg];
    const double lo = knots[seg - 1];
    const double nudge = 1e-12 * (1.0 + std::abs(hi));
    auto r = [&](double x) { return rate(std::clamp(x, lo + nudge, hi - nudge)); };
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / h - 1e-9));
    const double step = -(hi - lo) / static_cast<double>(n);
    double x = hi;
    for (std::size_t i = 0; i < n; ++i) {
      const double k1w = r(x) - w * w, k1s = w;
      const double w2 = w + 0.5 * step * k1w;
      const double k2w = r(x + 0.5 * step) - w2 * w2, k2s = w2;
      const double w3 = w + 0.5 * step * k2w;
      const double k3w = r(x + 0.5 * step) - w3 * w3, k3s = w3;
      const double w4 = w + step * k3w;
      const double k4w = r(x + step) - w4 * w4, k4s = w4;
      w += step / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
      s += step / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
      x = i + 1 == n ? lo : hi + step * static_cast<double>(i + 1);
      if (!std::isfinite(w) || !std::isfinite(s))
        throw Error("riccati: solution blew up; enlarge the domain or reduce the step");
      out.x.push_back(x);
      out.w.push_back(w);
      out.s.push_back(s);
    }
    for (const auto& [a, m] : atoms)
      if (a == lo && lo > 0.0) w -= m;
    if (lo > 0.0) out.w.back() = w;
  }
  std::reverse(out.x.begin(), out.x.end());
  std::reverse(out.w.begin(), out.w.end());
  std::reverse(out.s.begin(), out.s.end());
  return out;
}

double trapezoid(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) sum += 0.5 * (y(i) + y(i + 1)) * (x(i + 1) - x(i));
  return sum;
}

bool zero_potential(const PotentialSpec& pot, double X) {
  for (const auto& [a, m] : pot.atoms)
    if (m > 0.0) return false;
  if (!pot.f) return true;
  for (int i = 0; i <= 1000; ++i)
    if (pot.f(X * i / 1000.0) != 0.0) return false;
  return true;
}

}  // namespace

SLSolution solve_decreasing(const PotentialSpec& pot, double step) {
  for (const auto& [a, m] : pot.atoms)
    if (m < 0.0 || a < 0.0) throw Error("solve_decreasing: atoms need nonnegative location and mass");
  double X = pot.x_max;
  if (X <= 0.0) {
    double top = 0.0;
    for (const auto& [a, m] : pot.atoms) top = std::max(top, a);
    for (double b : pot.breakpoints) top = std::max(top, b);
    const double tail = pot(top + 1.0);
    X = top + (tail > 0.0 ? 12.0 / std::sqrt(tail) : 1.0);
  }
  SLSolution sol;
  if (zero_potential(pot, X)) {
    sol.x = Eigen::ArrayXd::LinSpaced(2, 0.0, X);
    sol.u = Eigen::ArrayXd::Ones(2);
    sol.du = Eigen::ArrayXd::Zero(2);
    sol.integral = X;
    sol.trivial = true;
    return sol;
  }
  const HalfLine hl = riccati([&](double x) { return pot(x); }, pot.atoms, pot.breakpoints, X, step);
  const auto n = static_cast<Eigen::Index>(hl.x.size());
  sol.x.resize(n);
  sol.u.resize(n);
  sol.du.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(i);
    sol.x(i) = hl.x[j];
    sol.u(i) = std::exp(hl.s[j] - hl.s[0]);
    sol.du(i) = hl.w[j] * sol.u(i);
  }
  sol.du0_plus = hl.w[0];
  sol.du0_minus = hl.w[0];
  sol.integral = trapezoid(sol.x, sol.u);
  return sol;
}

SLSolution solve_feynman_kac(double k, const PotentialSpec& f, bool literal, double step) {
  if (!(k > 0.0)) throw Error("solve_feynman_kac: k must be positive");
  const double scale = literal ? 1.0 : 2.0;
  const double X = f.x_max > 0.0 ? f.x_max : 12.0 / std::sqrt(scale * k);
  std::vector<std::pair<double, double>> right_atoms, left_atoms;
  for (const auto& [a, m] : f.atoms) {
    if (m < 0.0) throw Error("solve_feynman_kac: atom masses must be nonnegative");
    if (a > 0.0) right_atoms.emplace_back(a, scale * m);
    if (a < 0.0) left_atoms.emplace_back(-a, scale * m);
    if (a == 0.0) throw Error("solve_feynman_kac: atom at the origin is not supported");
  }
  std::vector<double> right_breaks, left_breaks;
  for (double b : f.breakpoints) (b > 0.0 ? right_breaks : left_breaks).push_back(std::abs(b));
  const HalfLine right = riccati([&](double x) { return scale * (k + f(x)); }, right_atoms, right_breaks, X, step);
  const HalfLine left = riccati([&](double y) { return scale * (k + f(-y)); }, left_atoms, left_breaks, X, step);
  const double denom = right.w[0] + left.w[0];
  if (!(denom < 0.0)) throw Error("solve_feynman_kac: non-decaying solution; enlarge the domain");
  const double u0 = -2.0 / denom;

  const auto nr = static_cast<Eigen::Index>(right.x.size());
  const auto nl = static_cast<Eigen::Index>(left.x.size());
  SLSolution sol;
  sol.x.resize(nl + nr - 1);
  sol.u.resize(nl + nr - 1);
  sol.du.resize(nl + nr - 1);
  for (Eigen::Index i = 0; i < nl; ++i) {
    const auto j = static_cast<std::size_t>(nl - 1 - i);
    sol.x(i) = -left.x[j];
    sol.u(i) = u0 * std::exp(left.s[j] - left.s[0]);
    sol.du(i) = -left.w[j] * sol.u(i);
  }
  for (Eigen::Index i = 1; i < nr; ++i) {
    const auto j = static_cast<std::size_t>(i);
    sol.x(nl - 1 + i) = right.x[j];
    sol.u(nl - 1 + i) = u0 * std::exp(right.s[j] - right.s[0]);
    sol.du(nl - 1 + i) = right.w[j] * sol.u(nl - 1 + i);
  }
  sol.du0_plus = u0 * right.w[0];
  sol.du0_minus = -u0 * left.w[0];
  sol.integral = trapezoid(sol.x, sol.u);
  return sol;
}

double ode_residual(const SLSolution& sol, const std::function<double(double)>& rate, const std::vector<double>& skip) {
  const Eigen::Index n = sol.x.size();
  const double top = sol.u.abs().maxCoeff();
  double worst = 0.0;
  for (Eigen::Index i = 2; i + 2 < n; ++i) {
    const double h = sol.x(i + 1) - sol.x(i);
    bool uniform = true;
    for (Eigen::Index j = i - 2; j < i + 2; ++j)
      uniform = uniform && std::abs((sol.x(j + 1) - sol.x(j)) - h) < 1e-9 * h;
    if (!uniform) continue;
    bool near = std::abs(sol.x(i)) < 2.5 * h;
    for (double p : skip) near = near || std::abs(sol.x(i) - p) < 2.5 * h;
    if (near) continue;
    const double d2 = (-sol.u(i - 2) + 16.0 * sol.u(i - 1) - 30.0 * sol.u(i) + 16.0 * sol.u(i + 1) - sol.u(i + 2)) /
                      (12.0 * h * h);
    worst = std::max(worst, std::abs(d2 - rate(sol.x(i)) * sol.u(i)));
  }
  return worst / top;
}

double evaluate(const SLSolution& sol, double x) {
  const Eigen::Index n = sol.x.size();
  if (x <= sol.x(0)) return sol.u(0);
  if (x >= sol.x(n - 1)) return sol.u(n - 1);
  const auto it = std::upper_bound(sol.x.data(), sol.x.data() + n, x);
  const Eigen::Index j = (it - sol.x.data()) - 1;
  const double w = (x - sol.x(j)) / (sol.x(j + 1) - sol.x(j));
  return (1.0 - w) * sol.u(j) + w * sol.u(j + 1);
}

double integrate_against(const SLSolution& sol, const std::function<double(double)>& q) {
  Eigen::ArrayXd y(sol.x.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = q(sol.x(i)) * sol.u(i);
  return trapezoid(sol.x, y);
}

ResolventEstimate resolvent_mc(const std::function<double(double)>& q, double k,
                               const std::function<double(double)>& f, std::size_t n, double dt,
                               std::uint64_t seed) {
  if (!(k > 0.0) || !(dt > 0.0) || n < 2) throw Error("resolvent_mc: need k > 0, dt > 0 and n >= 2");
  const std::vector<double> values = parallel_map(n, [&](std::size_t i) {
    Rng rng(mix_seed(seed, i));
    const double T = rng.exponential() / k;
    double x = 0.0, fx = f(0.0), integral = 0.0, t = 0.0;
    while (t < T) {
      const double h = std::min(dt, T - t);
      const double y = x + std::sqrt(h) * rng.normal();
      const double fy = f(y);
      integral += 0.5 * h * (fx + fy);
      x = y;
      fx = fy;
      t += h;
    }
    return q(x) * std::exp(-integral);
  });
  double sum = 0.0, sq = 0.0;
  for (double v : values) {
    sum += v;
    sq += v * v;
  }
  const auto nn = static_cast<double>(n);
  const double m = sum / nn;
  const double var = std::max(0.0, (sq - nn * m * m) / (nn - 1.0));
  return {m / k, std::sqrt(var / nn) / k};
}

}  // namespace lotex
