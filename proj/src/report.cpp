#include "matprod/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace matprod {

const ReportRow* ExperimentReport::find(int n, const std::string& metric) const {
  for (const auto& row : rows)
    if (row.n == n && row.metric == metric) return &row;
  return nullptr;
}

void to_json(nlohmann::json& j, const ExperimentReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"n", row.n},
                    {"metric", row.metric},
                    {"value", row.value},
                    {"iqr", row.iqr},
                    {"runtime_seconds", row.runtime_seconds}});
  }
  nlohmann::json accounting = nlohmann::json::array();
  for (const auto& a : r.accounting) {
    accounting.push_back(
        {{"n", a.n}, {"included", a.included}, {"excluded", a.excluded}, {"failures", a.failures}});
  }
  j = nlohmann::json{
      {"experiment", r.experiment}, {"seed", r.seed},     {"code_version", r.code_version},
      {"timestamp", r.timestamp},   {"config", r.config}, {"rows", rows},
      {"replicas", accounting}};
}

void from_json(const nlohmann::json& j, ExperimentReport& r) {
  r.experiment = j.at("experiment").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.code_version = j.at("code_version").get<std::string>();
  r.timestamp = j.at("timestamp").get<std::string>();
  r.config = j.at("config");
  r.rows.clear();
  for (const auto& row : j.at("rows")) {
    r.rows.push_back({row.at("n").get<int>(), row.at("metric").get<std::string>(),
                      row.at("value").get<double>(), row.at("iqr").get<double>(),
                      row.at("runtime_seconds").get<double>()});
  }
  r.accounting.clear();
  for (const auto& a : j.at("replicas")) {
    r.accounting.push_back({a.at("n").get<int>(), a.at("included").get<int>(),
                            a.at("excluded").get<int>(),
                            a.at("failures").get<std::vector<std::string>>()});
  }
}

ReportFormat report_format_from_string(const std::string& name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw std::invalid_argument("unknown report format '" + name + "' (expected csv or json)");
}

void write_csv(const ExperimentReport& r, std::ostream& out) {
  out << "n,metric,value,iqr,runtime_seconds\n";
  char buf[128];
  for (const auto& row : r.rows) {
    out << row.n << ',' << row.metric;
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.9g\n", row.value, row.iqr, row.runtime_seconds);
    out << buf;
  }
}

std::filesystem::path emit_report(const ExperimentReport& r, const std::filesystem::path& dir,
                                  ReportFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " + dir.string() + ": " +
                             ec.message());
  }
  const std::string ext = format == ReportFormat::csv ? "csv" : "json";
  const auto path = dir / (r.experiment + "_" + std::to_string(r.seed) + "." + ext);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  if (format == ReportFormat::csv) {
    write_csv(r, out);
  } else {
    out << nlohmann::json(r).dump(2) << '\n';
  }
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
  return path;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace matprod
