#include "gazescore/csv.hpp"

#include <charconv>
#include <cstdio>
#include <system_error>

#include "gazescore/errors.hpp"

namespace gazescore {

std::string format_double(double v) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) {
    throw NumericError("failed to format double");
  }
  return std::string(buf, end);
}

std::string format_int(long long v) {
  char buf[24];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

namespace {

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Splits one physical-or-logical CSV record. Quoted fields may contain
// embedded newlines, so reading continues across lines when a quote is open.
std::vector<std::string> parse_record(std::istream& in, std::size_t& line,
                                      const std::string& path, bool& got_any) {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  got_any = false;

  std::string raw;
  while (std::getline(in, raw)) {
    ++line;
    got_any = true;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::size_t i = 0;
    while (i < raw.size()) {
      char c = raw[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < raw.size() && raw[i + 1] == '"') {
            field += '"';
            ++i;
          } else {
            in_quotes = false;
          }
        } else {
          field += c;
        }
      } else if (c == '"') {
        in_quotes = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else {
        field += c;
      }
      ++i;
    }
    if (!in_quotes) {
      fields.push_back(std::move(field));
      return fields;
    }
    field += '\n';  // quoted field spanning lines
  }
  if (in_quotes) {
    throw DataError(path + ": unterminated quoted field at end of file");
  }
  return fields;
}

}  // namespace

CsvReader::CsvReader(std::string path, const std::vector<std::string>& required_columns)
    : path_(std::move(path)), in_(path_) {
  if (!in_) {
    throw DataError(path_ + ": cannot open file");
  }
  bool got_any = false;
  auto header = parse_record(in_, line_, path_, got_any);
  if (!got_any) {
    throw DataError(path_ + ": missing header row");
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    columns_[header[i]] = i;
  }
  for (const auto& col : required_columns) {
    if (!columns_.count(col)) {
      throw DataError(path_ + ": missing required column '" + col + "'");
    }
  }
}

bool CsvReader::next() {
  for (;;) {
    bool got_any = false;
    row_ = parse_record(in_, line_, path_, got_any);
    if (!got_any) return false;
    if (row_.size() == 1 && row_[0].empty()) continue;  // blank line
    if (row_.size() != columns_.size()) {
      fail("expected " + std::to_string(columns_.size()) + " fields, got " +
           std::to_string(row_.size()));
    }
    return true;
  }
}

const std::string& CsvReader::field(const std::string& column) const {
  auto it = columns_.find(column);
  if (it == columns_.end()) {
    throw DataError(path_ + ": no column '" + column + "'");
  }
  return row_[it->second];
}

bool CsvReader::has_column(const std::string& column) const {
  return columns_.count(column) != 0;
}

long long CsvReader::int_field(const std::string& column) const {
  const std::string& s = field(column);
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    fail("field '" + column + "' is not an integer: '" + s + "'");
  }
  return v;
}

double CsvReader::double_field(const std::string& column) const {
  const std::string& s = field(column);
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    fail("field '" + column + "' is not a number: '" + s + "'");
  }
  return v;
}

std::string CsvReader::where() const {
  return path_ + ":" + std::to_string(line_);
}

void CsvReader::fail(const std::string& message) const {
  throw DataError(where() + ": " + message);
}

CsvWriter::CsvWriter(std::string path, const std::vector<std::string>& header)
    : path_(std::move(path)), out_(path_, std::ios::binary), width_(header.size()) {
  if (!out_) {
    throw DataError(path_ + ": cannot open for writing");
  }
  write_line(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) {
    throw DataError(path_ + ": row width " + std::to_string(fields.size()) +
                    " does not match header width " + std::to_string(width_));
  }
  write_line(fields);
}

void CsvWriter::write_line(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << (needs_quoting(fields[i]) ? quote(fields[i]) : fields[i]);
  }
  out_ << '\n';
}

}  // namespace gazescore
