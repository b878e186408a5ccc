#include "odormap/stats.hpp"

#include <cmath>
#include <fstream>
#include <utility>

#include "csv_util.hpp"
#include "odormap/error.hpp"
#include "odormap/rng.hpp"

namespace odormap {

namespace {

// Pearson on a fixed x against a permutation of b's items. Means and
// variances of both triangle vectors are permutation-invariant, so only the
// cross term depends on the permutation; recomputing everything keeps the
// code in one obvious form and is cheap at these sizes.
double pearson_raw(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double cov = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    double dx = x[k] - mx;
    double dy = y[k] - my;
    cov += dx * dy;
    sx += dx * dx;
    sy += dy * dy;
  }
  if (sx == 0.0 || sy == 0.0) return std::nan("");
  return cov / std::sqrt(sx * sy);
}

bool at_least_as_extreme(double permuted, double observed, Alternative alt) {
  switch (alt) {
    case Alternative::greater: return permuted >= observed;
    case Alternative::less: return permuted <= observed;
    case Alternative::two_sided: return std::fabs(permuted) >= std::fabs(observed);
  }
  return false;
}

}  // namespace

Alternative alternative_from_token(std::string_view token) {
  if (token == "greater") return Alternative::greater;
  if (token == "less") return Alternative::less;
  if (token == "two-sided") return Alternative::two_sided;
  throw Error("unknown alternative '" + std::string(token) +
              "' (expected greater, less or two-sided)");
}

std::string_view alternative_token(Alternative alt) {
  switch (alt) {
    case Alternative::greater: return "greater";
    case Alternative::less: return "less";
    case Alternative::two_sided: return "two-sided";
  }
  throw Error("invalid alternative");
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error("pearson: length mismatch");
  if (x.size() < 2) throw Error("pearson: need at least 2 values");
  double r = pearson_raw(x, y);
  if (std::isnan(r)) throw Error("pearson: zero variance");
  return r;
}

MantelResult mantel(const DistanceMatrix& a, const DistanceMatrix& b, std::size_t permutations,
                    Alternative alternative, std::uint64_t rng_seed) {
  if (a.items() != b.items())
    throw Error("item-set mismatch between '" + a.metric_tag() + "' and '" + b.metric_tag() +
                "' (labels must be identical and in the same order)");
  const std::size_t n = a.size();
  if (n < 3) throw Error("mantel needs at least 3 items, got " + std::to_string(n));
  if (permutations < 1) throw Error("mantel needs at least 1 permutation");

  const std::vector<double> x = a.condensed();
  const std::vector<double> y = b.condensed();
  auto is_constant = [](const std::vector<double>& v) {
    for (double e : v)
      if (e != v[0]) return false;
    return true;
  };
  if (is_constant(x))
    throw Error("constant distance matrix '" + a.metric_tag() + "': zero triangle variance");
  if (is_constant(y))
    throw Error("constant distance matrix '" + b.metric_tag() + "': zero triangle variance");
  double observed = pearson_raw(x, y);

  Rng rng(rng_seed);
  std::vector<double> y_perm(y.size());
  std::size_t extreme = 0;
  for (std::size_t t = 0; t < permutations; ++t) {
    std::vector<std::size_t> perm = rng.permutation(n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) y_perm[k++] = b.at(perm[i], perm[j]);
    double r = pearson_raw(x, y_perm);
    if (at_least_as_extreme(r, observed, alternative)) ++extreme;
  }

  MantelResult result;
  result.r = observed;
  result.p_value =
      static_cast<double>(1 + extreme) / static_cast<double>(permutations + 1);
  result.permutations = permutations;
  result.alternative = alternative;
  result.n_items = n;
  return result;
}

const MantelResult& ComparisonGrid::at(std::size_t i, std::size_t j) const {
  if (i == j) throw Error("grid diagonal is r = 1 by definition and not stored");
  if (i > j) std::swap(i, j);
  const std::size_t n = metric_tags.size();
  return cells[pair_linear_index(n, i, j)].result;
}

ComparisonGrid comparison_grid(const std::vector<DistanceMatrix>& matrices,
                               std::size_t permutations, Alternative alternative,
                               std::uint64_t rng_seed) {
  if (matrices.size() < 2) throw Error("comparison grid needs at least 2 matrices");
  for (std::size_t i = 1; i < matrices.size(); ++i)
    if (matrices[i].items() != matrices[0].items())
      throw Error("item-set mismatch between '" + matrices[0].metric_tag() + "' and '" +
                  matrices[i].metric_tag() + "'");

  ComparisonGrid grid;
  for (const auto& m : matrices) grid.metric_tags.push_back(m.metric_tag());

  for (std::size_t i = 0; i < matrices.size(); ++i) {
    for (std::size_t j = i + 1; j < matrices.size(); ++j) {
      // Canonical ordering: the lexicographically smaller tag is argument a,
      // and the per-cell seed hashes the ordered tag pair. Results are then
      // independent of the order matrices were supplied in.
      const DistanceMatrix* first = &matrices[i];
      const DistanceMatrix* second = &matrices[j];
      if (second->metric_tag() < first->metric_tag()) std::swap(first, second);
      std::uint64_t cell_seed = derive_seed(
          rng_seed, fnv1a64(first->metric_tag() + "\x1f" + second->metric_tag()));
      GridCell cell;
      cell.tag_a = first->metric_tag();
      cell.tag_b = second->metric_tag();
      cell.result = mantel(*first, *second, permutations, alternative, cell_seed);
      grid.cells.push_back(std::move(cell));
    }
  }
  return grid;
}

std::string_view significance_stars(double p) {
  if (p <= 0.001) return "***";
  if (p <= 0.01) return "**";
  if (p <= 0.05) return "*";
  return "ns";
}

void save_grid_csv(const ComparisonGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path.string());
  out << "tag_a,tag_b,r,p,permutations,stars\n";
  for (const auto& cell : grid.cells) {
    out << csv::join_row({cell.tag_a, cell.tag_b, format_double(cell.result.r),
                          format_double(cell.result.p_value),
                          std::to_string(cell.result.permutations),
                          std::string(significance_stars(cell.result.p_value))})
        << "\n";
  }
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace odormap
