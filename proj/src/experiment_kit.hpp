// Shared plumbing for the experiment catalog.

#ifndef LOTEX_EXPERIMENT_KIT_HPP
#define LOTEX_EXPERIMENT_KIT_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lotex/harness.hpp"
#include "lotex/localtime.hpp"
#include "lotex/paths.hpp"
#include "lotex/rng.hpp"
#include "lotex/stats.hpp"

namespace lotex::kit {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Context {
  const ExperimentConfig& cfg;
  const ExperimentInfo& info;
  std::size_t n = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;

  bool quick() const noexcept { return cfg.suite == Suite::quick; }
  double param(const std::string& key, double fallback) const {
    const auto it = cfg.params.find(key);
    return it == cfg.params.end() ? fallback : it->second;
  }
  double bias(double fallback) const { return cfg.bias_tolerance.value_or(fallback); }
  /// Seed of replicate i in the named stream.
  std::uint64_t stream(std::uint64_t tag, std::size_t i) const { return mix_seed(mix_seed(seed, tag), i); }
};

using Runner = std::function<ExperimentResult(const Context&)>;

struct Entry {
  ExperimentInfo info;
  Runner run;
};

void register_path_experiments(std::vector<Entry>& out);
void register_excursion_experiments(std::vector<Entry>& out);
void register_model_experiments(std::vector<Entry>& out);

/// Folds several sub-tests into one report: passed when all pass, statistic
/// and p-value taken from the weakest sub-test.
class Checks {
 public:
  void add(const std::string& label, const TestReport& r);
  void note(const std::string& key, DetailValue value) { details_[key] = std::move(value); }
  TestReport finish(const Context& ctx) const;

 private:
  std::vector<std::pair<std::string, TestReport>> parts_;
  std::map<std::string, DetailValue> details_;
};

/// |mean - target| <= rel * |target|, reported with the standard error.
TestReport relative_mean_test(std::span<const double> sample, double target, double rel);

/// Pass/fail report for a deterministic comparison.
TestReport tolerance_check(double value, double target, double tol);

struct Candidate {
  std::string name;
  std::vector<double> values;  ///< predicted value at each grid point
};

/// Picks the candidate whose predictions agree with every estimate within
/// mult * se + allowance. The verdict is "none" or "ambiguous" otherwise and
/// the report passes only for a unique verdict.
TestReport adjudicate(std::span<const double> estimates, std::span<const double> se,
                      const std::vector<Candidate>& candidates, double mult = 4.0, double allowance = 0.0);

/// Running maximum over a sampled Brownian path, each step replaced by the
/// maximum of the bridge between its end points. Steps whose bridge exceeds
/// the current maximum with probability below 1e-12 are not sampled.
double bridge_sup(std::span<const double> values, double dt, Rng& rng, double start_max = -kInf);

/// Advances the running maximum over one step a -> b of length dt.
inline void update_sup(double& sup, double a, double b, double dt, Rng& rng) {
  sup = std::max(sup, std::max(a, b));
  if ((sup - a) * (sup - b) < 14.0 * dt) sup = std::max(sup, bridge_max(a, b, dt, rng.uniform_pos()));
}

struct TauWalk {
  double base_dt = 1e-4;
  double scale = 0.1;           ///< steps grow as (|x| / scale)^2 outside [-scale, scale]
  std::size_t max_steps = 50'000'000;
  double horizon = kInf;
};

/// Brownian motion from 0 on the level-scaled clock until its local time at 0
/// reaches l, the local time accrued step by step from the exact bridge law.
/// visit(a, b, t, h) is called for every step from a to b starting at time t
/// with length h. Returns false when the horizon or the step cap comes first.
template <class Visit>
bool walk_to_local_time(double l, const TauWalk& w, Rng& rng, Visit&& visit) {
  double x = 0.0, t = 0.0, lt = 0.0;
  for (std::size_t k = 0; k < w.max_steps; ++k) {
    if (t >= w.horizon) return false;
    const double r = std::max(1.0, std::abs(x) / w.scale);
    const double h = w.base_dt * r * r;
    const double y = x + std::sqrt(h) * rng.normal();
    if (!bridge_misses(x, y, h)) lt += bridge_local_time(x, y, h, rng.uniform_pos());
    visit(x, y, t, h);
    x = y;
    t += h;
    if (lt >= l) return true;
  }
  return false;
}

/// Portion of a step from a to b spent above zero, under linear interpolation.
inline double positive_fraction(double a, double b) {
  if (a >= 0.0 && b >= 0.0) return 1.0;
  if (a <= 0.0 && b <= 0.0) return 0.0;
  return std::max(a, b) / (std::abs(a) + std::abs(b));
}

std::uint64_t name_hash(const std::string& name);

ExperimentInfo info(std::string name, std::string summary, std::vector<std::string> operations,
                    std::vector<std::string> primitives, std::size_t n_full, double dt_full, std::size_t n_quick,
                    double dt_quick, double horizon, bool adjudication = false);

PlotData plot(std::vector<double> sample, std::function<double(double)> density, std::string title);

}  // namespace lotex::kit

#endif  // LOTEX_EXPERIMENT_KIT_HPP
