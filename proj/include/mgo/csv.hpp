#pragma once

// Minimal deterministic CSV support for the scenario runners: header row,
// decimal point, no thousands separators, amounts at 17 significant digits
// (exact double round trip). Metadata rides in leading '#' comment lines.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "mgo/errors.hpp"

namespace mgo::csv {

/// 17-significant-digit rendering; parses back to the identical double.
std::string format_value(double v);

/// Fixed two-decimal rendering for display columns matched against tables.
std::string format_fixed2(long double v);

double parse_value(const std::string& cell, const std::string& path, std::size_t line);

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path);
  void comment(std::string_view text);
  void header(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& cells);
  void close();

 private:
  void line(const std::vector<std::string>& cells);

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_ = 0;
};

struct Table {
  std::vector<std::string> comments;  // leading '#' lines, marker stripped
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table read(const std::filesystem::path& path);

/// Balance input: single `balance` column, one positive amount per row.
/// Malformed content throws CsvParseError with the offending line number.
std::vector<double> read_balances(const std::filesystem::path& path);

}  // namespace mgo::csv
