#include "q4f/harness/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <stdexcept>

#include "q4f/errors.hpp"

namespace q4f::harness {

bool ExperimentReport::all_passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::size_t ExperimentReport::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("no column named " + std::string(name));
  return static_cast<std::size_t>(it - columns.begin());
}

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf.data(), end);
}

std::string format_number(long long value) { return std::to_string(value); }

std::string format_list(const std::vector<double>& values, char separator) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != 0) out += separator;
    out += format_number(values[i]);
  }
  return out;
}

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string to_csv(const ExperimentReport& report) {
  std::string out;
  auto append_row = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i != 0) out += ',';
      out += csv_field(cells[i]);
    }
    out += '\n';
  };
  append_row(report.columns);
  for (const auto& row : report.rows) append_row(row);
  return out;
}

void write_report(const ExperimentReport& report, const std::string& csv_path) {
  {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw Error(ErrorCode::InvalidArgument, "cannot write '" + csv_path + "'");
    csv << to_csv(report);
  }
  std::ofstream meta(csv_path + ".meta.json", std::ios::binary);
  if (!meta) throw Error(ErrorCode::InvalidArgument, "cannot write metadata for '" + csv_path + "'");
  meta << report.metadata.dump(2) << '\n';
}

}  // namespace q4f::harness
