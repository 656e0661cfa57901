#include "core/csv.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <system_error>

#include "core/errors.hpp"

namespace evk {

std::vector<std::string> split_fields(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double_field(std::string_view s, const std::string& where) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    fail(ErrorCode::Parse, where + ": bad number '" + std::string(s) + "'");
  return v;
}

long long parse_int_field(std::string_view s, const std::string& where) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    fail(ErrorCode::Parse, where + ": bad integer '" + std::string(s) + "'");
  return v;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) fail(ErrorCode::Internal, "to_chars failed");
  return std::string(buf, ptr);
}

CsvReader::CsvReader(const std::string& path, char delim)
    : path_(path), in_(path), delim_(delim) {
  if (!in_) fail(ErrorCode::Io, "cannot open '" + path + "' for reading");
}

std::string CsvReader::context() const {
  return path_ + ":" + std::to_string(line_);
}

void CsvReader::expect_header(const std::vector<std::string>& expected) {
  std::string line;
  if (!std::getline(in_, line))
    fail(ErrorCode::Parse, path_ + ": empty file, expected header row");
  ++line_;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto got = split_fields(line, delim_);
  if (got != expected) {
    std::string want;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) want += delim_;
      want += expected[i];
    }
    fail(ErrorCode::Parse,
         context() + ": bad header '" + line + "', expected '" + want + "'");
  }
  n_fields_ = expected.size();
}

bool CsvReader::next_row(std::vector<std::string>& out) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out = split_fields(line, delim_);
    if (out.size() != n_fields_)
      fail(ErrorCode::Parse, context() + ": expected " +
                                 std::to_string(n_fields_) + " fields, got " +
                                 std::to_string(out.size()));
    return true;
  }
  return false;
}

void CsvWriter::raw_line(std::string_view line) {
  buf_.append(line);
  buf_.push_back('\n');
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].find(delim_) != std::string::npos)
      fail(ErrorCode::InvalidArgument,
           "CSV field contains the delimiter: '" + fields[i] + "'");
    if (i) buf_.push_back(delim_);
    buf_.append(fields[i]);
  }
  buf_.push_back('\n');
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) fail(ErrorCode::Io, "cannot create directory '" +
                                    target.parent_path().string() + "': " +
                                    ec.message());
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) fail(ErrorCode::Io, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    fail(ErrorCode::Io, "cannot rename '" + tmp.string() + "' to '" + path +
                            "': " + ec.message());
  }
}

}  // namespace evk
