// Apache License, Version 2.0, refer to LICENSE.txt

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nggp/cli.hh"

namespace nggp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool parse_number(std::string_view field, double& value) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(value);
}

}  // namespace

Dataset parse_csv(std::istream& in) {
  std::vector<double> values;
  std::size_t cols = 0, rows = 0, line_no = 0;
  bool first_content = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (view.empty()) continue;
    auto fields = split_fields(view);
    std::vector<double> row(fields.size());
    bool ok = true;
    for (std::size_t j = 0; j < fields.size(); ++j) ok = ok && parse_number(fields[j], row[j]);
    if (first_content) {
      first_content = false;
      cols = fields.size();
      if (!ok) continue;  // header
    }
    if (fields.size() != cols) {
      throw std::runtime_error("CSV line " + std::to_string(line_no) + ": expected " +
                               std::to_string(cols) + " fields, found " +
                               std::to_string(fields.size()));
    }
    if (!ok) {
      throw std::runtime_error("CSV line " + std::to_string(line_no) +
                               ": cannot parse a number");
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw std::runtime_error("CSV input contains no data rows");
  return Dataset(rows, cols, std::move(values));
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open data file '" + path + "'");
  return parse_csv(in);
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace nggp
