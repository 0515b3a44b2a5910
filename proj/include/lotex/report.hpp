// JSON and CSV serialization of test reports, and SVG histograms.

#ifndef LOTEX_REPORT_HPP
#define LOTEX_REPORT_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lotex/harness.hpp"
#include "lotex/stats.hpp"

namespace lotex {

enum class ReportFormat { json, csv };

/// Fields in this order: experiment, statistic, p_value, passed, n_paths, dt,
/// seed, runtime_ms, details. Non-finite numbers are written as strings.
std::string report_to_json(const TestReport& report, int indent = 2);
TestReport report_from_json(const std::string& text);

std::string reports_to_csv(std::span<const TestReport> reports);
std::string suite_to_json(const SuiteReport& suite, int indent = 2);

/// Writes a JSON array or a CSV table of the reports.
void emit_report(std::span<const TestReport> reports, ReportFormat format, const std::string& path);
void emit_suite(const SuiteReport& suite, const std::string& path);

/// Histogram of the sample with the reference density overlaid, as SVG.
std::string plot_svg(std::span<const double> sample, const std::function<double(double)>& density,
                     const std::string& title, int bins = 40);
void emit_plot(std::span<const double> sample, const std::function<double(double)>& density,
               const std::string& path, const std::string& title = "");

}  // namespace lotex

#endif  // LOTEX_REPORT_HPP
