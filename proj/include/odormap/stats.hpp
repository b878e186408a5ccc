#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "odormap/core_data.hpp"

namespace odormap {

enum class Alternative { greater, less, two_sided };

Alternative alternative_from_token(std::string_view token);
std::string_view alternative_token(Alternative alt);

struct MantelResult {
  double r = 0.0;
  double p_value = 1.0;
  std::size_t permutations = 0;
  Alternative alternative = Alternative::two_sided;
  std::size_t n_items = 0;
};

// Mantel permutation test. r is the Pearson correlation of the two
// strict-triangle vectors. Significance comes from permuting the item order
// of b (rows and columns simultaneously) with a seeded generator:
//   p = (1 + #{permuted r at least as extreme as observed}) / (permutations + 1)
// Both matrices must share one ItemSet in the same order, n >= 3.
MantelResult mantel(const DistanceMatrix& a, const DistanceMatrix& b, std::size_t permutations,
                    Alternative alternative, std::uint64_t rng_seed);

struct GridCell {
  std::string tag_a;
  std::string tag_b;
  MantelResult result;
};

// One MantelResult per unordered pair of input matrices, in input-index
// order (i < j). Within each cell the lexicographically smaller metric tag
// is argument a, so p-values do not depend on the input ordering.
struct ComparisonGrid {
  std::vector<std::string> metric_tags;
  std::vector<GridCell> cells;

  const MantelResult& at(std::size_t i, std::size_t j) const;
};

ComparisonGrid comparison_grid(const std::vector<DistanceMatrix>& matrices,
                               std::size_t permutations, Alternative alternative,
                               std::uint64_t rng_seed);

// Conventional markers: p <= 0.001 "***", <= 0.01 "**", <= 0.05 "*", else "ns".
std::string_view significance_stars(double p);

// Columns: tag_a, tag_b, r, p, permutations, stars.
void save_grid_csv(const ComparisonGrid& grid, const std::filesystem::path& path);

// Pearson correlation of two equal-length vectors; rejects zero variance.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace odormap
