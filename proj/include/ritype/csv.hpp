#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ritype::csv {

// RFC 4180 table: UTF-8, comma separators, mandatory header row,
// double-quote quoting. Fully empty lines are skipped.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line per data row

  // Source line of a data row; tables built in code lack line_numbers, so
  // fall back to the line the row would occupy in a freshly formatted file.
  std::size_t line(std::size_t row) const {
    return row < line_numbers.size() ? line_numbers[row] : row + 2;
  }
};

Table parse(std::string_view text);
Table read_file(const std::string& path);

// Canonical rendering: LF line ends, fields quoted only when they contain
// a comma, quote, or line break. parse(format(t)) == t.
std::string format(const Table& t);
void write_file(const std::string& path, const Table& t);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace ritype::csv
