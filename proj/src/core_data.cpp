#include "odormap/core_data.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "csv_util.hpp"
#include "odormap/error.hpp"

namespace odormap {

namespace {

constexpr double kAsymmetryTolerance = 1e-6;

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path.string());
  out << content;
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

ItemSet::ItemSet(std::vector<std::string> labels) {
  labels_.reserve(labels.size());
  std::unordered_set<std::string> seen;
  for (auto& raw : labels) {
    std::string label = trim(raw);
    if (label.empty()) throw Error("empty label in item set");
    if (!seen.insert(label).second) throw Error("duplicate label: " + label);
    labels_.push_back(std::move(label));
  }
}

std::optional<std::size_t> ItemSet::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return i;
  return std::nullopt;
}

std::size_t pair_count(std::size_t n) {
  if (n < 2) throw Error("pair_count requires at least 2 items, got " + std::to_string(n));
  return n * (n - 1) / 2;
}

std::size_t pair_linear_index(std::size_t n, std::size_t i, std::size_t j) {
  // k = i*n - i(i+1)/2 + (j - i - 1) for i < j < n
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

std::vector<PairIndex> all_pairs(std::size_t n) {
  std::vector<PairIndex> pairs;
  pairs.reserve(pair_count(n));
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({i, j, k++});
  return pairs;
}

ProfileMatrix::ProfileMatrix(ItemSet items, ItemSet attributes, Matrix values)
    : items_(std::move(items)), attributes_(std::move(attributes)), values_(std::move(values)) {
  if (values_.rows() != items_.size() || values_.cols() != attributes_.size()) {
    throw Error("profile shape mismatch: values are " + std::to_string(values_.rows()) + "x" +
                std::to_string(values_.cols()) + ", expected " + std::to_string(items_.size()) +
                "x" + std::to_string(attributes_.size()));
  }
  for (double v : values_.data())
    if (!std::isfinite(v)) throw Error("non-finite entry in profile matrix");
}

DistanceMatrix::DistanceMatrix(ItemSet items, Matrix values, std::string metric_tag)
    : items_(std::move(items)), values_(std::move(values)), metric_tag_(std::move(metric_tag)) {
  const std::size_t n = items_.size();
  if (values_.rows() != n || values_.cols() != n)
    throw Error("distance matrix shape mismatch for tag '" + metric_tag_ + "'");
  for (std::size_t i = 0; i < n; ++i) {
    if (values_(i, i) != 0.0)
      throw Error("nonzero diagonal at item '" + items_.label(i) + "'");
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = values_(i, j);
      if (v != values_(j, i))
        throw Error("asymmetric values between '" + items_.label(i) + "' and '" +
                    items_.label(j) + "'");
      if (!std::isfinite(v) || v < 0.0)
        throw Error("invalid distance between '" + items_.label(i) + "' and '" +
                    items_.label(j) + "'");
    }
  }
}

std::vector<double> DistanceMatrix::condensed() const {
  const std::size_t n = size();
  std::vector<double> v;
  v.reserve(pair_count(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) v.push_back(values_(i, j));
  return v;
}

ProfileMatrix load_profile_csv(const std::filesystem::path& path, Orientation orientation) {
  auto rows = csv::read_file(path);
  if (rows.size() < 2) throw Error("profile CSV needs a header and at least one data row: " +
                                   path.string());
  const std::size_t width = rows[0].size();
  if (width < 2) throw Error("profile CSV needs at least one value column: " + path.string());

  std::vector<std::string> col_labels(rows[0].begin() + 1, rows[0].end());
  std::vector<std::string> row_labels;
  Matrix values(rows.size() - 1, width - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != width)
      throw Error("ragged row " + std::to_string(r + 1) + " in " + path.string() + ": expected " +
                  std::to_string(width) + " fields, got " + std::to_string(rows[r].size()));
    row_labels.push_back(rows[r][0]);
    for (std::size_t c = 1; c < width; ++c)
      values(r - 1, c - 1) = csv::parse_cell(rows[r][c], r + 1, c + 1);
  }

  ItemSet row_set(std::move(row_labels));
  ItemSet col_set(std::move(col_labels));
  if (orientation == Orientation::items_as_rows)
    return {std::move(row_set), std::move(col_set), std::move(values)};
  return {std::move(col_set), std::move(row_set), values.transposed()};
}

ItemSet load_item_list(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  std::vector<std::string> labels;
  std::string line;
  bool csv_header = path.extension() == ".csv";
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string label = trim(line);
    if (label.empty()) continue;
    if (csv_header) {
      csv_header = false;  // first non-blank line of a .csv is the header
      continue;
    }
    labels.push_back(std::move(label));
  }
  if (labels.empty()) throw Error("empty item list: " + path.string());
  return ItemSet(std::move(labels));
}

void save_labeled_square_csv(const std::string& tag, const ItemSet& items, const Matrix& values,
                             const std::filesystem::path& path) {
  const std::size_t n = items.size();
  std::string out;
  std::vector<std::string> header;
  header.reserve(n + 1);
  header.push_back(tag);
  for (const auto& label : items.labels()) header.push_back(label);
  out += csv::join_row(header);
  out.push_back('\n');
  std::vector<std::string> row(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    row[0] = items.label(i);
    for (std::size_t j = 0; j < n; ++j) row[j + 1] = format_double(values(i, j));
    out += csv::join_row(row);
    out.push_back('\n');
  }
  write_text_file(path, out);
}

LabeledSquareCsv load_labeled_square_csv(const std::filesystem::path& path) {
  auto rows = csv::read_file(path);
  if (rows.empty()) throw Error("empty matrix CSV: " + path.string());
  const std::size_t n = rows[0].size() - 1;
  if (n < 1 || rows.size() != n + 1)
    throw Error("matrix CSV is not square: " + path.string());

  LabeledSquareCsv result;
  result.tag = trim(rows[0][0]);
  std::vector<std::string> header_labels(rows[0].begin() + 1, rows[0].end());
  std::vector<std::string> row_labels;
  result.values = Matrix(n, n);
  for (std::size_t r = 1; r <= n; ++r) {
    if (rows[r].size() != n + 1)
      throw Error("ragged row " + std::to_string(r + 1) + " in " + path.string());
    row_labels.push_back(rows[r][0]);
    for (std::size_t c = 1; c <= n; ++c)
      result.values(r - 1, c - 1) = csv::parse_cell(rows[r][c], r + 1, c + 1);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (trim(header_labels[i]) != trim(row_labels[i]))
      throw Error("label mismatch between header and first column at position " +
                  std::to_string(i + 1) + " in " + path.string() + ": '" + header_labels[i] +
                  "' vs '" + row_labels[i] + "'");
  }
  result.items = ItemSet(std::move(row_labels));
  return result;
}

void save_distance_csv(const DistanceMatrix& m, const std::filesystem::path& path) {
  save_labeled_square_csv(m.metric_tag(), m.items(), m.values(), path);
}

DistanceMatrix load_distance_csv(const std::filesystem::path& path) {
  auto raw = load_labeled_square_csv(path);
  const std::size_t n = raw.items.size();
  for (std::size_t i = 0; i < n; ++i) {
    raw.values(i, i) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double a = raw.values(i, j);
      double b = raw.values(j, i);
      if (std::fabs(a - b) > kAsymmetryTolerance)
        throw Error("asymmetry beyond tolerance between '" + raw.items.label(i) + "' and '" +
                    raw.items.label(j) + "' in " + path.string() + ": " + format_double(a) +
                    " vs " + format_double(b));
      double avg = (a + b) / 2.0;
      raw.values(i, j) = avg;
      raw.values(j, i) = avg;
    }
  }
  std::string tag = raw.tag.empty() ? path.stem().string() : raw.tag;
  return {std::move(raw.items), std::move(raw.values), std::move(tag)};
}

}  // namespace odormap
