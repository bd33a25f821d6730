#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace q4f::harness {

/// One acceptance verdict derived from report rows.
struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentReport {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<Check> checks;
  nlohmann::json metadata = nlohmann::json::object();

  [[nodiscard]] bool all_passed() const noexcept;
  /// Index of a column by name; throws std::out_of_range.
  [[nodiscard]] std::size_t column(std::string_view name) const;
};

/// Shortest round-trip decimal representation ('.' separator, no locale).
std::string format_number(double value);
std::string format_number(long long value);
std::string format_list(const std::vector<double>& values, char separator = ';');

/// RFC 4180 field quoting: fields with ',', '"', CR or LF are quoted.
std::string csv_field(std::string_view field);

/// Header plus rows, LF line endings.
std::string to_csv(const ExperimentReport& report);

/// Writes `<csv_path>` and the metadata sidecar `<csv_path>.meta.json`.
void write_report(const ExperimentReport& report, const std::string& csv_path);

}  // namespace q4f::harness
