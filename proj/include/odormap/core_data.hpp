#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace odormap {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<double>& data() const { return data_; }

  Matrix transposed() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Ordered list of unique labels. Order is stable and defines row/column
// order in every matrix derived from it. Labels are trimmed on construction;
// duplicates and empty labels are rejected.
class ItemSet {
 public:
  ItemSet() = default;
  explicit ItemSet(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<std::size_t> index_of(const std::string& label) const;

  bool operator==(const ItemSet&) const = default;

 private:
  std::vector<std::string> labels_;
};

// Position of an unordered pair (i < j) in the condensed vectorization of
// the strict triangle of an n x n symmetric matrix. Pairs are enumerated
// (0,1), (0,2), ..., (0,n-1), (1,2), ...
struct PairIndex {
  std::size_t i;
  std::size_t j;
  std::size_t linear;
};

// n(n-1)/2. Throws for n < 2.
std::size_t pair_count(std::size_t n);
std::size_t pair_linear_index(std::size_t n, std::size_t i, std::size_t j);
std::vector<PairIndex> all_pairs(std::size_t n);

// Items x attributes rating matrix. Every entry is finite.
class ProfileMatrix {
 public:
  ProfileMatrix(ItemSet items, ItemSet attributes, Matrix values);

  const ItemSet& items() const { return items_; }
  const ItemSet& attributes() const { return attributes_; }
  const Matrix& values() const { return values_; }

  ProfileMatrix transposed() const { return {attributes_, items_, values_.transposed()}; }

 private:
  ItemSet items_;
  ItemSet attributes_;
  Matrix values_;
};

// Symmetric zero-diagonal pairwise dissimilarity matrix with item labels.
// Construction enforces: square shape, exact symmetry, zero diagonal,
// finite non-negative entries.
class DistanceMatrix {
 public:
  DistanceMatrix(ItemSet items, Matrix values, std::string metric_tag);

  const ItemSet& items() const { return items_; }
  const Matrix& values() const { return values_; }
  const std::string& metric_tag() const { return metric_tag_; }
  std::size_t size() const { return items_.size(); }
  double at(std::size_t i, std::size_t j) const { return values_(i, j); }

  // Strict-triangle vectorization in PairIndex order; length pair_count(n).
  std::vector<double> condensed() const;

 private:
  ItemSet items_;
  Matrix values_;
  std::string metric_tag_;
};

enum class Orientation { items_as_rows, items_as_columns };

ProfileMatrix load_profile_csv(const std::filesystem::path& path, Orientation orientation);

// One label per line, or a one-column CSV (".csv" suffix: first line is a
// header). Blank lines are skipped, labels trimmed.
ItemSet load_item_list(const std::filesystem::path& path);

void save_distance_csv(const DistanceMatrix& m, const std::filesystem::path& path);

// Loads a square labeled CSV, validates that row and column labels agree,
// tolerates asymmetry up to 1e-6 (re-symmetrized by averaging) and forces
// the diagonal to zero. The corner cell carries the metric tag; when empty
// the file stem is used.
DistanceMatrix load_distance_csv(const std::filesystem::path& path);

// Square labeled matrix CSV used by distance and similarity files. Header
// row is "<tag>,label1,...,labelN"; each data row starts with its label.
// Values are written in shortest round-trip form.
struct LabeledSquareCsv {
  std::string tag;
  ItemSet items;
  Matrix values;
};

void save_labeled_square_csv(const std::string& tag, const ItemSet& items, const Matrix& values,
                             const std::filesystem::path& path);
LabeledSquareCsv load_labeled_square_csv(const std::filesystem::path& path);

std::string trim(const std::string& s);

// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double v);

}  // namespace odormap
