// Command-line front end: list, run and run-all.

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lotex/harness.hpp"
#include "lotex/paths.hpp"
#include "lotex/report.hpp"

namespace {

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw lotex::Error("--param expects key=value, got '" + item + "'");
    std::size_t used = 0;
    const std::string value = item.substr(eq + 1);
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) throw lotex::Error("--param value is not a number: '" + item + "'");
    out[item.substr(0, eq)] = v;
  }
  return out;
}

std::string status(const lotex::TestReport& r, bool adjudication) {
  if (adjudication) {
    const auto it = r.details.find("verdict");
    const std::string verdict = it != r.details.end() && std::holds_alternative<std::string>(it->second)
                                    ? std::get<std::string>(it->second)
                                    : "none";
    return "VERDICT " + verdict;
  }
  return r.passed ? "PASS" : "FAIL";
}

void print_line(const lotex::TestReport& r) {
  const bool adj = lotex::is_adjudication(r.experiment);
  std::cerr << std::left << std::setw(26) << r.experiment << ' ' << std::setw(6) << (r.passed ? "ok" : "not ok")
            << " stat=" << r.statistic;
  if (r.p_value) std::cerr << " p=" << *r.p_value;
  std::cerr << " n=" << r.n_paths << " dt=" << r.dt << " " << r.runtime_ms << "ms  " << status(r, adj);
  if (const auto it = r.details.find("error"); it != r.details.end())
    std::cerr << "  error: " << std::get<std::string>(it->second);
  std::cerr << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo checks of Brownian local time and excursion identities"};
  app.set_version_flag("--version", std::string(lotex::kVersion));
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with defaults and per-experiment overrides")
      ->check(CLI::ExistingFile);

  auto* list = app.add_subcommand("list", "List the experiments");
  bool list_json = false;
  list->add_flag("--json", list_json, "Print the catalog as JSON lines");

  auto* run = app.add_subcommand("run", "Run one experiment");
  std::string name;
  std::optional<std::size_t> n;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  std::optional<double> bias;
  std::string out_dir;
  bool emit_plots = false;
  std::string suite = "full";
  std::vector<std::string> params;
  run->add_option("name", name, "Experiment name")->required();
  run->add_option("--n", n, "Number of paths")->check(CLI::PositiveNumber);
  run->add_option("--dt", dt, "Time step")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Seed");
  run->add_option("--bias-tolerance", bias, "KS bias tolerance override")->check(CLI::NonNegativeNumber);
  run->add_option("--param", params, "Experiment parameter key=value (repeatable)");
  run->add_option("--suite", suite, "Catalog defaults to use when --n/--dt are absent")
      ->check(CLI::IsMember({"quick", "full"}));
  run->add_option("--out", out_dir, "Directory for the JSON/CSV report and plots");
  run->add_flag("--emit-plots", emit_plots, "Write an SVG histogram with the reference density");

  auto* all = app.add_subcommand("run-all", "Run a suite");
  std::string all_suite = "quick";
  std::optional<std::uint64_t> all_seed;
  std::string all_out;
  int jobs = 0;
  bool all_plots = false;
  std::vector<std::string> only;
  all->add_option("--suite", all_suite, "quick or full")->check(CLI::IsMember({"quick", "full"}))->required();
  all->add_option("--seed", all_seed, "Seed for every experiment");
  all->add_option("--out", all_out, "Directory for suite.json, reports.csv and plots");
  all->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  all->add_option("--only", only, "Restrict to these experiments");
  all->add_flag("--emit-plots", all_plots, "Write SVG histograms to the output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    const lotex::ConfigFile file = config_path.empty() ? lotex::ConfigFile{} : lotex::load_config(config_path);

    if (*list) {
      for (const auto& info : lotex::experiment_catalog()) {
        if (list_json) {
          std::cout << "{\"name\":\"" << info.name << "\",\"adjudication\":" << (info.adjudication ? "true" : "false")
                    << ",\"n_full\":" << info.n_full << ",\"dt_full\":" << info.dt_full << ",\"n_quick\":" << info.n_quick
                    << ",\"dt_quick\":" << info.dt_quick << "}\n";
        } else {
          std::cout << std::left << std::setw(26) << info.name << (info.adjudication ? " [adjudication] " : " ")
                    << info.summary << '\n';
        }
      }
      return 0;
    }

    if (*run) {
      lotex::ConfigEntry cli;
      cli.n_paths = n;
      cli.dt = dt;
      cli.seed = seed;
      cli.bias_tolerance = bias;
      cli.params = parse_params(params);
      const lotex::ExperimentConfig cfg = lotex::resolve_config(name, lotex::parse_suite(suite), file, cli);
      const lotex::ExperimentResult result = lotex::execute_experiment(cfg);
      std::cout << lotex::report_to_json(result.report) << '\n';
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        const std::vector<lotex::TestReport> one{result.report};
        lotex::emit_report(one, lotex::ReportFormat::json, out_dir + "/" + name + ".json");
        lotex::emit_report(one, lotex::ReportFormat::csv, out_dir + "/" + name + ".csv");
        if (emit_plots && result.plot)
          lotex::emit_plot(result.plot->sample, result.plot->density, out_dir + "/" + name + ".svg",
                           result.plot->title);
      }
      print_line(result.report);
      return result.report.passed || lotex::is_adjudication(name) ? 0 : 1;
    }

    lotex::SuiteOptions opt;
    opt.suite = lotex::parse_suite(all_suite);
    opt.seed = all_seed;
    opt.file = file;
    opt.filter = only;
    opt.jobs = jobs;
    opt.out_dir = all_out;
    opt.emit_plots = all_plots;
    opt.on_report = print_line;
    for (const std::string& o : only) lotex::experiment_info(o);
    const lotex::SuiteReport report = lotex::run_suite(opt);
    if (!all_out.empty()) {
      std::filesystem::create_directories(all_out);
      lotex::emit_suite(report, all_out + "/suite.json");
      lotex::emit_report(report.reports, lotex::ReportFormat::json, all_out + "/reports.json");
      lotex::emit_report(report.reports, lotex::ReportFormat::csv, all_out + "/reports.csv");
    }
    std::cerr << report.suite << " suite: " << report.passed << " passed, " << report.failed << " failed, "
              << report.adjudications << " adjudications, " << report.runtime_ms << " ms\n";
    return report.all_gating_passed() ? 0 : 1;
  } catch (const lotex::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
