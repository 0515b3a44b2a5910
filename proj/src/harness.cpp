#include "lotex/harness.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "experiment_kit.hpp"
#include "lotex/parallel.hpp"
#include "lotex/report.hpp"

namespace lotex {

namespace kit {

void Checks::add(const std::string& label, const TestReport& r) {
  parts_.emplace_back(label, r);
}

TestReport Checks::finish(const Context& ctx) const {
  TestReport out;
  out.experiment = ctx.cfg.name;
  out.n_paths = ctx.n;
  out.dt = ctx.dt;
  out.seed = ctx.cfg.seed;
  out.passed = true;
  const std::pair<std::string, TestReport>* weakest = nullptr;
  for (const auto& part : parts_) {
    const TestReport& r = part.second;
    out.passed = out.passed && r.passed;
    auto rank = [](const TestReport& t) { return std::make_pair(t.passed ? 1 : 0, t.p_value.value_or(2.0)); };
    if (!weakest || rank(r) < rank(weakest->second)) weakest = &part;
    out.details[part.first + ": passed"] = std::string(r.passed ? "true" : "false");
    out.details[part.first + ": statistic"] = r.statistic;
    if (r.p_value) out.details[part.first + ": p_value"] = *r.p_value;
    for (const auto& [k, v] : r.details) out.details[part.first + ": " + k] = v;
  }
  if (weakest) {
    out.statistic = weakest->second.statistic;
    out.p_value = weakest->second.p_value;
    out.details["weakest"] = weakest->first;
  }
  for (const auto& [k, v] : details_) out.details[k] = v;
  return out;
}

TestReport relative_mean_test(std::span<const double> sample, double target, double rel) {
  TestReport r = moment_test(sample, target, 4.0, 0.0);
  const double m = std::get<double>(r.details["mean"]);
  r.statistic = target != 0.0 ? (m - target) / std::abs(target) : m;
  const double se = std::get<double>(r.details["se"]);
  const double band = std::max(rel * std::abs(target), 4.0 * se);
  r.passed = std::abs(m - target) <= band;
  r.details["relative_tolerance"] = rel;
  r.details["relative_binds"] = rel * std::abs(target) >= 4.0 * se ? 1.0 : 0.0;
  return r;
}

TestReport tolerance_check(double value, double target, double tol) {
  TestReport r;
  r.statistic = value - target;
  r.passed = std::abs(value - target) <= tol;
  r.details["value"] = value;
  r.details["target"] = target;
  r.details["tolerance"] = tol;
  return r;
}

TestReport adjudicate(std::span<const double> estimates, std::span<const double> se,
                      const std::vector<Candidate>& candidates, double mult, double allowance) {
  TestReport r;
  std::vector<std::string> supported;
  double best = kInf;
  for (const Candidate& c : candidates) {
    if (c.values.size() != estimates.size()) throw Error("adjudicate: candidate '" + c.name + "' has the wrong size");
    double worst = 0.0;
    std::size_t agree = 0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
      const double z = std::abs(estimates[i] - c.values[i]) / std::max(se[i], 1e-300);
      worst = std::max(worst, z);
      if (std::abs(estimates[i] - c.values[i]) <= mult * se[i] + allowance) ++agree;
    }
    r.details[c.name + ": agreeing points"] = static_cast<double>(agree);
    r.details[c.name + ": max |z|"] = worst;
    best = std::min(best, worst);
    if (agree == estimates.size()) supported.push_back(c.name);
  }
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    r.details["estimate " + std::to_string(i)] = estimates[i];
    r.details["se " + std::to_string(i)] = se[i];
  }
  r.statistic = best;
  r.passed = supported.size() == 1;
  r.details["verdict"] = supported.size() == 1 ? supported.front() : supported.empty() ? "none" : "ambiguous";
  r.details["grid points"] = static_cast<double>(estimates.size());
  return r;
}

double bridge_sup(std::span<const double> values, double dt, Rng& rng, double start_max) {
  if (values.empty()) return start_max;
  double sup = std::max(start_max, values[0]);
  for (std::size_t i = 1; i < values.size(); ++i) update_sup(sup, values[i - 1], values[i], dt, rng);
  return sup;
}

std::uint64_t name_hash(const std::string& name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ExperimentInfo info(std::string name, std::string summary, std::vector<std::string> operations,
                    std::vector<std::string> primitives, std::size_t n_full, double dt_full, std::size_t n_quick,
                    double dt_quick, double horizon, bool adjudication) {
  ExperimentInfo e;
  e.name = std::move(name);
  e.summary = std::move(summary);
  e.operations = std::move(operations);
  e.primitives = std::move(primitives);
  e.n_full = n_full;
  e.dt_full = dt_full;
  e.n_quick = n_quick;
  e.dt_quick = dt_quick;
  e.horizon = horizon;
  e.adjudication = adjudication;
  return e;
}

PlotData plot(std::vector<double> sample, std::function<double(double)> density, std::string title) {
  return {std::move(sample), std::move(density), std::move(title)};
}

}  // namespace kit

namespace {

const std::vector<kit::Entry>& entries() {
  static const std::vector<kit::Entry> all = [] {
    std::vector<kit::Entry> v;
    kit::register_path_experiments(v);
    kit::register_excursion_experiments(v);
    kit::register_model_experiments(v);
    return v;
  }();
  return all;
}

const kit::Entry& entry(const std::string& name) {
  for (const auto& e : entries())
    if (e.info.name == name) return e;
  throw Error("unknown experiment '" + name + "'");
}

ConfigEntry parse_entry(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw Error("config: " + where + " must be an object");
  ConfigEntry e;
  for (const auto& [key, value] : j.items()) {
    if (key == "n") {
      if (!value.is_number_unsigned() || value.get<std::uint64_t>() == 0)
        throw Error("config: " + where + ".n must be a positive integer");
      e.n_paths = value.get<std::size_t>();
    } else if (key == "dt") {
      if (!value.is_number() || !(value.get<double>() > 0.0)) throw Error("config: " + where + ".dt must be positive");
      e.dt = value.get<double>();
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) throw Error("config: " + where + ".seed must be an unsigned integer");
      e.seed = value.get<std::uint64_t>();
    } else if (key == "bias_tolerance") {
      if (!value.is_number() || value.get<double>() < 0.0)
        throw Error("config: " + where + ".bias_tolerance must be nonnegative");
      e.bias_tolerance = value.get<double>();
    } else if (key == "params") {
      if (!value.is_object()) throw Error("config: " + where + ".params must be an object");
      for (const auto& [pk, pv] : value.items()) {
        if (!pv.is_number()) throw Error("config: " + where + ".params." + pk + " must be a number");
        e.params[pk] = pv.get<double>();
      }
    } else {
      throw Error("config: unknown key '" + key + "' in " + where);
    }
  }
  return e;
}

void merge(ExperimentConfig& cfg, const ConfigEntry& e) {
  if (e.n_paths) cfg.n_paths = e.n_paths;
  if (e.dt) cfg.dt = e.dt;
  if (e.seed) cfg.seed = *e.seed;
  if (e.bias_tolerance) cfg.bias_tolerance = e.bias_tolerance;
  for (const auto& [k, v] : e.params) cfg.params[k] = v;
}

std::string number(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

Suite parse_suite(const std::string& name) {
  if (name == "quick") return Suite::quick;
  if (name == "full") return Suite::full;
  throw Error("unknown suite '" + name + "' (expected quick or full)");
}

std::string suite_name(Suite suite) { return suite == Suite::quick ? "quick" : "full"; }

const std::vector<ExperimentInfo>& experiment_catalog() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> v;
    for (const auto& e : entries()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

const ExperimentInfo& experiment_info(const std::string& name) { return entry(name).info; }

bool is_adjudication(const std::string& name) { return experiment_info(name).adjudication; }

ExperimentResult execute_experiment(const ExperimentConfig& config) {
  const kit::Entry& e = entry(config.name);
  const bool quick = config.suite == Suite::quick;
  kit::Context ctx{config, e.info, config.n_paths.value_or(quick ? e.info.n_quick : e.info.n_full),
                   config.dt.value_or(quick ? e.info.dt_quick : e.info.dt_full),
                   mix_seed(config.seed, kit::name_hash(config.name))};
  if (ctx.n < 2) throw Error(config.name + ": n must be at least 2");
  if (!(ctx.dt > 0.0)) throw Error(config.name + ": dt must be positive");
  const double steps = static_cast<double>(ctx.n) * e.info.horizon / ctx.dt;
  if (steps > config.step_budget)
    throw Error(config.name + ": budget exceeded (" + number(steps) + " steps > " + number(config.step_budget) + ")");
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result = e.run(ctx);
  const auto t1 = std::chrono::steady_clock::now();
  result.report.experiment = config.name;
  result.report.n_paths = ctx.n;
  result.report.dt = ctx.dt;
  result.report.seed = config.seed;
  result.report.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  if (e.info.adjudication) result.report.details["adjudication"] = std::string("true");
  return result;
}

TestReport run_experiment(const ExperimentConfig& config) { return execute_experiment(config).report; }

ConfigFile parse_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& err) {
    throw Error(std::string("config: invalid JSON: ") + err.what());
  }
  if (!j.is_object()) throw Error("config: top level must be an object");
  ConfigFile out;
  for (const auto& [key, value] : j.items()) {
    if (key == "defaults") {
      out.defaults = parse_entry(value, "defaults");
    } else if (key == "overrides") {
      if (!value.is_object()) throw Error("config: overrides must be an object");
      for (const auto& [name, sub] : value.items()) {
        experiment_info(name);
        out.overrides[name] = parse_entry(sub, "overrides." + name);
      }
    } else {
      throw Error("config: unknown key '" + key + "'");
    }
  }
  return out;
}

ConfigFile load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

ExperimentConfig resolve_config(const std::string& name, Suite suite, const ConfigFile& file, const ConfigEntry& cli) {
  experiment_info(name);
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.suite = suite;
  merge(cfg, file.defaults);
  if (const auto it = file.overrides.find(name); it != file.overrides.end()) merge(cfg, it->second);
  merge(cfg, cli);
  return cfg;
}

SuiteReport run_suite(const SuiteOptions& options) {
  for (const std::string& name : options.filter) experiment_info(name);
  if (options.jobs > 0) set_worker_count(options.jobs);
  SuiteReport out;
  out.suite = suite_name(options.suite);
  ConfigEntry cli;
  cli.seed = options.seed;
  out.seed = options.seed.value_or(options.file.defaults.seed.value_or(kDefaultSeed));
  out.config["suite"] = out.suite;
  out.config["seed"] = std::to_string(out.seed);
  out.config["jobs"] = std::to_string(worker_count());
  const auto t0 = std::chrono::steady_clock::now();
  for (const ExperimentInfo& info : experiment_catalog()) {
    if (!options.filter.empty() &&
        std::find(options.filter.begin(), options.filter.end(), info.name) == options.filter.end())
      continue;
    const ExperimentConfig cfg = resolve_config(info.name, options.suite, options.file, cli);
    ExperimentResult result;
    try {
      result = execute_experiment(cfg);
    } catch (const Error& err) {
      result.report.experiment = info.name;
      result.report.passed = false;
      result.report.seed = cfg.seed;
      result.report.details["error"] = std::string(err.what());
    }
    if (options.emit_plots && !options.out_dir.empty() && result.plot) {
      std::filesystem::create_directories(options.out_dir);
      emit_plot(result.plot->sample, result.plot->density, options.out_dir + "/" + info.name + ".svg",
                result.plot->title);
    }
    if (info.adjudication)
      ++out.adjudications;
    else if (result.report.passed)
      ++out.passed;
    else
      ++out.failed;
    out.config[info.name + ".n"] = std::to_string(result.report.n_paths);
    out.config[info.name + ".dt"] = number(result.report.dt);
    if (options.on_report) options.on_report(result.report);
    out.reports.push_back(std::move(result.report));
  }
  out.runtime_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace lotex
