#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace gazescore {

/// Shortest round-trip decimal rendering of a double (via std::to_chars).
/// Locale-free and deterministic; integral values print without a fraction.
std::string format_double(double v);

std::string format_int(long long v);

/// Header-bearing CSV reader with RFC-4180 quoting. Field access is by
/// column name; every error message carries file and line context.
class CsvReader {
 public:
  CsvReader(std::string path, const std::vector<std::string>& required_columns);

  /// Advances to the next data row. Returns false at end of file.
  bool next();

  const std::string& field(const std::string& column) const;
  bool has_column(const std::string& column) const;

  long long int_field(const std::string& column) const;
  double double_field(const std::string& column) const;

  /// "file:line" of the current row, for error reporting.
  std::string where() const;

  [[noreturn]] void fail(const std::string& message) const;

 private:
  std::string path_;
  std::ifstream in_;
  std::unordered_map<std::string, std::size_t> columns_;
  std::vector<std::string> row_;
  std::size_t line_ = 0;
};

class CsvWriter {
 public:
  CsvWriter(std::string path, const std::vector<std::string>& header);

  void row(const std::vector<std::string>& fields);

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t width_;

  void write_line(const std::vector<std::string>& fields);
};

}  // namespace gazescore
