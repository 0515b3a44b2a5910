#include "lotex/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lotex/paths.hpp"

namespace lotex {

namespace {

using ordered = nlohmann::ordered_json;

ordered number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0.0 ? "inf" : "-inf";
}

double read_number(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  throw Error("report: expected a number, got " + j.dump());
}

ordered to_ordered(const TestReport& r) {
  ordered j;
  j["experiment"] = r.experiment;
  j["statistic"] = number(r.statistic);
  j["p_value"] = r.p_value ? number(*r.p_value) : ordered(nullptr);
  j["passed"] = r.passed;
  j["n_paths"] = r.n_paths;
  j["dt"] = number(r.dt);
  j["seed"] = r.seed;
  j["runtime_ms"] = r.runtime_ms;
  ordered details = ordered::object();
  for (const auto& [k, v] : r.details) {
    if (const double* d = std::get_if<double>(&v))
      details[k] = number(*d);
    else
      details[k] = std::get<std::string>(v);
  }
  j["details"] = std::move(details);
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace

std::string report_to_json(const TestReport& report, int indent) { return to_ordered(report).dump(indent); }

TestReport report_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("report: invalid JSON: ") + e.what());
  }
  static const char* required[] = {"experiment", "statistic", "p_value", "passed", "n_paths",
                                   "dt",         "seed",      "runtime_ms", "details"};
  for (const char* key : required)
    if (!j.contains(key)) throw Error(std::string("report: missing field '") + key + "'");
  TestReport r;
  r.experiment = j.at("experiment").get<std::string>();
  r.statistic = read_number(j.at("statistic"));
  if (!j.at("p_value").is_null()) r.p_value = read_number(j.at("p_value"));
  r.passed = j.at("passed").get<bool>();
  r.n_paths = j.at("n_paths").get<std::size_t>();
  r.dt = read_number(j.at("dt"));
  r.seed = j.at("seed").get<std::uint64_t>();
  r.runtime_ms = j.at("runtime_ms").get<std::int64_t>();
  for (const auto& [k, v] : j.at("details").items()) {
    if (v.is_number())
      r.details[k] = v.get<double>();
    else if (v.is_string())
      r.details[k] = v.get<std::string>();
    else
      throw Error("report: detail '" + k + "' must be a number or a string");
  }
  return r;
}

std::string reports_to_csv(std::span<const TestReport> reports) {
  std::ostringstream out;
  out << "experiment,statistic,p_value,passed,n_paths,dt,seed,runtime_ms,details\n";
  for (const TestReport& r : reports) {
    const ordered j = to_ordered(r);
    out << csv_field(r.experiment) << ',' << j["statistic"].dump() << ','
        << (r.p_value ? j["p_value"].dump() : std::string()) << ',' << (r.passed ? "true" : "false") << ','
        << r.n_paths << ',' << j["dt"].dump() << ',' << r.seed << ',' << r.runtime_ms << ','
        << csv_field(j["details"].dump()) << '\n';
  }
  return out.str();
}

std::string suite_to_json(const SuiteReport& suite, int indent) {
  ordered j;
  j["suite"] = suite.suite;
  j["seed"] = suite.seed;
  j["version"] = suite.version;
  j["passed"] = suite.passed;
  j["failed"] = suite.failed;
  j["adjudications"] = suite.adjudications;
  j["all_gating_passed"] = suite.all_gating_passed();
  j["runtime_ms"] = suite.runtime_ms;
  ordered config = ordered::object();
  for (const auto& [k, v] : suite.config) config[k] = v;
  j["config"] = std::move(config);
  ordered reports = ordered::array();
  for (const TestReport& r : suite.reports) reports.push_back(to_ordered(r));
  j["reports"] = std::move(reports);
  return j.dump(indent);
}

void emit_report(std::span<const TestReport> reports, ReportFormat format, const std::string& path) {
  if (format == ReportFormat::csv) {
    write_file(path, reports_to_csv(reports));
    return;
  }
  ordered arr = ordered::array();
  for (const TestReport& r : reports) arr.push_back(to_ordered(r));
  write_file(path, arr.dump(2) + "\n");
}

void emit_suite(const SuiteReport& suite, const std::string& path) { write_file(path, suite_to_json(suite) + "\n"); }

std::string plot_svg(std::span<const double> sample, const std::function<double(double)>& density,
                     const std::string& title, int bins) {
  if (bins < 1) throw Error("plot_svg: bins must be positive");
  std::vector<double> x;
  for (double v : sample)
    if (std::isfinite(v)) x.push_back(v);
  if (x.empty()) throw Error("plot_svg: no finite values");
  std::sort(x.begin(), x.end());
  // Central 99.5% keeps single outliers from flattening the picture.
  const auto at = [&](double q) { return x[static_cast<std::size_t>(q * static_cast<double>(x.size() - 1))]; };
  double lo = at(0.0025), hi = at(0.9975);
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / bins;
  std::vector<double> height(static_cast<std::size_t>(bins), 0.0);
  for (double v : x) {
    if (v < lo || v > hi) continue;
    const auto b = std::min(static_cast<std::size_t>((v - lo) / width), static_cast<std::size_t>(bins - 1));
    height[b] += 1.0;
  }
  for (double& h : height) h /= static_cast<double>(x.size()) * width;
  const int curve_points = 200;
  std::vector<std::pair<double, double>> curve;
  for (int i = 0; i <= curve_points; ++i) {
    const double u = lo + (hi - lo) * i / curve_points;
    const double d = density ? density(u) : 0.0;
    curve.emplace_back(u, std::isfinite(d) ? d : 0.0);
  }
  double top = 0.0;
  for (double h : height) top = std::max(top, h);
  for (const auto& p : curve) top = std::max(top, p.second);
  if (!(top > 0.0)) top = 1.0;
  top *= 1.05;

  const double W = 640, H = 400, left = 60, right = 20, upper = 40, lower = 40;
  const double pw = W - left - right, ph = H - upper - lower;
  const auto sx = [&](double v) { return left + (v - lo) / (hi - lo) * pw; };
  const auto sy = [&](double v) { return upper + ph - v / top * ph; };
  std::ostringstream s;
  s.precision(6);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
    << xml_escape(title) << "</text>\n";
  s << "<g class=\"histogram\" fill=\"#9ecae1\" stroke=\"#3182bd\" stroke-width=\"0.5\">\n";
  for (int b = 0; b < bins; ++b) {
    const double x0 = sx(lo + b * width), x1 = sx(lo + (b + 1) * width);
    const double y0 = sy(height[static_cast<std::size_t>(b)]);
    s << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << x1 - x0 << "\" height=\"" << upper + ph - y0
      << "\"/>\n";
  }
  s << "</g>\n<polyline class=\"density\" fill=\"none\" stroke=\"#de2d26\" stroke-width=\"2\" points=\"";
  for (const auto& [u, d] : curve) s << sx(u) << ',' << sy(d) << ' ';
  s << "\"/>\n";
  s << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<line x1=\"" << left << "\" y1=\"" << upper + ph << "\" x2=\"" << left + pw << "\" y2=\"" << upper + ph
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << upper << "\" x2=\"" << left << "\" y2=\"" << upper + ph
    << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4;
    s << "<text x=\"" << sx(v) << "\" y=\"" << upper + ph + 16 << "\" text-anchor=\"middle\">" << v << "</text>\n";
    const double d = top * i / 4;
    s << "<text x=\"" << left - 6 << "\" y=\"" << sy(d) + 4 << "\" text-anchor=\"end\">" << d << "</text>\n";
  }
  s << "</g>\n</svg>\n";
  return s.str();
}

void emit_plot(std::span<const double> sample, const std::function<double(double)>& density, const std::string& path,
               const std::string& title) {
  write_file(path, plot_svg(sample, density, title));
}

}  // namespace lotex
