#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evk {

// Minimal CSV support for the flat, quote-free tables this tool reads and
// writes.  Fields may not contain the delimiter; that is enforced on write.

std::vector<std::string> split_fields(std::string_view line, char delim = ',');

// Strict scalar parsers: the whole field must be consumed.
double parse_double_field(std::string_view s, const std::string& where);
long long parse_int_field(std::string_view s, const std::string& where);

// Shortest round-trip decimal rendering (std::to_chars).
std::string format_double(double v);

// Line-oriented reader that tracks line numbers for error messages.
class CsvReader {
public:
  CsvReader(const std::string& path, char delim = ',');

  // Reads the header row; throws Parse if it does not equal `expected`.
  void expect_header(const std::vector<std::string>& expected);

  // Returns false at EOF.  Skips blank lines.  Throws Parse when the field
  // count differs from the header's.
  bool next_row(std::vector<std::string>& out);

  long line_number() const { return line_; }
  std::string context() const;  // "path:line"

private:
  std::string path_;
  std::ifstream in_;
  char delim_;
  long line_ = 0;
  std::size_t n_fields_ = 0;
};

class CsvWriter {
public:
  explicit CsvWriter(char delim = ',') : delim_(delim) {}

  void raw_line(std::string_view line);  // e.g. "# provenance" comments
  void row(const std::vector<std::string>& fields);
  const std::string& str() const { return buf_; }

private:
  char delim_;
  std::string buf_;
};

// Whole-file helpers.
std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace evk
