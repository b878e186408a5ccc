#include "csv_util.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "odormap/error.hpp"

namespace odormap::csv {

namespace {

std::vector<std::string> split_record(const std::string& line, std::size_t file_row) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field.push_back(c);
    }
    ++i;
  }
  if (quoted) throw Error("unterminated quote in CSV row " + std::to_string(file_row));
  fields.push_back(field);
  return fields;
}

}  // namespace

std::vector<std::vector<std::string>> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t file_row = 0;
  while (std::getline(in, line)) {
    ++file_row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split_record(line, file_row));
  }
  return rows;
}

std::string quote_field(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += quote_field(fields[i]);
  }
  return out;
}

double parse_cell(const std::string& cell, std::size_t file_row, std::size_t file_col) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  while (last != first && (last[-1] == ' ' || last[-1] == '\t')) --last;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw Error("non-numeric cell '" + cell + "' at row " + std::to_string(file_row) +
                ", column " + std::to_string(file_col));
  }
  if (!std::isfinite(value)) {
    throw Error("non-finite cell at row " + std::to_string(file_row) + ", column " +
                std::to_string(file_col));
  }
  return value;
}

}  // namespace odormap::csv
