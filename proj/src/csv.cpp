#include "ritype/csv.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ritype/common.hpp"

namespace ritype::csv {

namespace {

std::string line_msg(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

Table parse(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> record_lines;

  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t row_line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
    field_started = false;
  };
  auto end_row = [&] {
    bool blank = row.empty() && field.empty() && !field_started && !field_was_quoted;
    if (!blank) {
      end_field();
      records.push_back(std::move(row));
      record_lines.push_back(row_line);
      row.clear();
    }
    row_line = line;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field.empty() && !field_started) {
          in_quotes = true;
          field_was_quoted = true;
          field_started = true;
        } else if (field_was_quoted) {
          throw InputError(line_msg(line, "unexpected character after closing quote"));
        } else {
          throw InputError(line_msg(line, "stray quote inside unquoted field"));
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') break;  // consumed with the LF
        throw InputError(line_msg(line, "bare carriage return"));
      case '\n':
        ++line;
        end_row();
        break;
      default:
        if (field_was_quoted)
          throw InputError(line_msg(line, "unexpected character after closing quote"));
        field += c;
        field_started = true;
        break;
    }
  }
  if (in_quotes) throw InputError(line_msg(row_line, "unterminated quoted field"));
  end_row();

  if (records.empty()) throw InputError("missing header row");

  Table t;
  t.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.header.size()) {
      throw InputError(line_msg(record_lines[r],
                                "expected " + std::to_string(t.header.size()) + " fields, got " +
                                    std::to_string(records[r].size())));
    }
    t.rows.push_back(std::move(records[r]));
    t.line_numbers.push_back(record_lines[r]);
  }
  return t;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw InputError("write failed: " + path);
}

Table read_file(const std::string& path) { return parse(read_text_file(path)); }

namespace {

void append_field(std::string& out, const std::string& f) {
  bool needs_quotes = f.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) {
    out += f;
    return;
  }
  out += '"';
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

void append_row(std::string& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    append_field(out, row[i]);
  }
  out += '\n';
}

}  // namespace

std::string format(const Table& t) {
  std::string out;
  append_row(out, t.header);
  for (const auto& row : t.rows) append_row(out, row);
  return out;
}

void write_file(const std::string& path, const Table& t) { write_text_file(path, format(t)); }

}  // namespace ritype::csv
