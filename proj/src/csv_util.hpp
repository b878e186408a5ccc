#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace odormap::csv {

// Minimal strict CSV: UTF-8, comma separator, '.' decimal point, no locale.
// Double quotes delimit fields containing commas, quotes or newlines; inner
// quotes are doubled. Fully empty lines are skipped.
std::vector<std::vector<std::string>> read_file(const std::filesystem::path& path);

std::string quote_field(const std::string& field);

std::string join_row(const std::vector<std::string>& fields);

// Parses a cell as double via std::from_chars. Throws odormap::Error naming
// the 1-based file row and column on failure or non-finite values.
double parse_cell(const std::string& cell, std::size_t file_row, std::size_t file_col);

}  // namespace odormap::csv
