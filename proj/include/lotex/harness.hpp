// Experiment catalog, configuration resolution and suite runs.

#ifndef LOTEX_HARNESS_HPP
#define LOTEX_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lotex/stats.hpp"

namespace lotex {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 20240601;

enum class Suite { quick, full };

Suite parse_suite(const std::string& name);
std::string suite_name(Suite suite);

struct ExperimentConfig {
  std::string name;
  Suite suite = Suite::full;
  std::optional<std::size_t> n_paths;  ///< catalog default for the suite when empty
  std::optional<double> dt;
  std::uint64_t seed = kDefaultSeed;
  std::map<std::string, double> params;  ///< experiment-specific overrides
  std::optional<double> bias_tolerance;
  /// Upper bound on n_paths * horizon / dt.
  double step_budget = 5e10;
};

struct ExperimentInfo {
  std::string name;
  std::string summary;
  bool adjudication = false;
  std::vector<std::string> operations;  ///< module operations exercised
  std::vector<std::string> primitives;  ///< stats primitives used
  std::size_t n_full = 0;
  double dt_full = 0.0;
  std::size_t n_quick = 0;
  double dt_quick = 0.0;
  double horizon = 1.0;  ///< typical simulated time per path, for the budget check
};

const std::vector<ExperimentInfo>& experiment_catalog();

/// Throws "unknown experiment" for names outside the catalog.
const ExperimentInfo& experiment_info(const std::string& name);

struct PlotData {
  std::vector<double> sample;
  std::function<double(double)> density;
  std::string title;
};

struct ExperimentResult {
  TestReport report;
  std::optional<PlotData> plot;
};

/// Runs one experiment. Reports are a function of the configuration alone
/// apart from runtime_ms.
ExperimentResult execute_experiment(const ExperimentConfig& config);
TestReport run_experiment(const ExperimentConfig& config);

/// Per-experiment settings read from a JSON file:
/// {"defaults": {"n", "dt", "seed"}, "overrides": {name: {"n", "dt", "seed",
/// "bias_tolerance", "params": {...}}}}.
struct ConfigEntry {
  std::optional<std::size_t> n_paths;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  std::optional<double> bias_tolerance;
  std::map<std::string, double> params;
};

struct ConfigFile {
  ConfigEntry defaults;
  std::map<std::string, ConfigEntry> overrides;
};

ConfigFile parse_config(const std::string& json_text);
ConfigFile load_config(const std::string& path);

/// Merges file defaults, the experiment's override and then command-line
/// values; later sources win.
ExperimentConfig resolve_config(const std::string& name, Suite suite, const ConfigFile& file,
                                const ConfigEntry& cli);

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::vector<TestReport> reports;
  std::size_t passed = 0;
  std::size_t failed = 0;                ///< gating experiments that failed
  std::size_t adjudications = 0;
  std::int64_t runtime_ms = 0;
  std::map<std::string, std::string> config;  ///< echo of the resolved settings

  bool all_gating_passed() const noexcept { return failed == 0; }
};

struct SuiteOptions {
  Suite suite = Suite::quick;
  std::optional<std::uint64_t> seed;  ///< overrides file and default seeds
  ConfigFile file;
  std::vector<std::string> filter;  ///< run only these names when non-empty; unknown names throw
  int jobs = 0;                     ///< worker threads; 0 keeps the current setting
  std::string out_dir;              ///< per-test plots are written here when set
  bool emit_plots = false;
  std::function<void(const TestReport&)> on_report;  ///< progress callback
};

SuiteReport run_suite(const SuiteOptions& options);

bool is_adjudication(const std::string& name);

}  // namespace lotex

#endif  // LOTEX_HARNESS_HPP
