#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

namespace matprod {

inline constexpr const char* kCodeVersion = "0.1.0";

struct ReportRow {
  int n = 0;
  std::string metric;
  double value = 0.0;
  double iqr = 0.0;
  double runtime_seconds = 0.0;
  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

/// Replicas used and dropped (decomposition failures) at one n.
struct ReplicaAccounting {
  int n = 0;
  int included = 0;
  int excluded = 0;
  std::vector<std::string> failures;
  friend bool operator==(const ReplicaAccounting&, const ReplicaAccounting&) = default;
};

struct ExperimentReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string code_version = kCodeVersion;
  std::string timestamp;
  nlohmann::json config;
  std::vector<ReportRow> rows;
  std::vector<ReplicaAccounting> accounting;

  const ReportRow* find(int n, const std::string& metric) const;
  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

void to_json(nlohmann::json& j, const ExperimentReport& r);
void from_json(const nlohmann::json& j, ExperimentReport& r);

enum class ReportFormat { csv, json };
ReportFormat report_format_from_string(const std::string& name);

/// Header "n,metric,value,iqr,runtime_seconds" then one line per row.
void write_csv(const ExperimentReport& r, std::ostream& out);

/// Writes <dir>/<experiment>_<seed>.<csv|json>, creating dir if needed.
/// Throws std::runtime_error naming the path on I/O failure.
std::filesystem::path emit_report(const ExperimentReport& r, const std::filesystem::path& dir,
                                  ReportFormat format);

/// UTC time formatted as ISO 8601.
std::string utc_timestamp();

}  // namespace matprod
