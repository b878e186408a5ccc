#include "odormap/embedding.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "csv_util.hpp"
#include "odormap/error.hpp"
#include "odormap/rng.hpp"

namespace odormap {

namespace {

// Euclidean distances between the rows of an n x k configuration.
Matrix config_distances(const Matrix& coords) {
  const std::size_t n = coords.rows();
  const std::size_t k = coords.cols();
  Matrix dist(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double sum = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        double d = coords(i, c) - coords(j, c);
        sum += d * d;
      }
      double d = std::sqrt(sum);
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }
  return dist;
}

void center_columns(Matrix& coords) {
  const std::size_t n = coords.rows();
  const std::size_t k = coords.cols();
  for (std::size_t c = 0; c < k; ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += coords(i, c);
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) coords(i, c) -= mean;
  }
}

double sum_squared_dissimilarities(const DistanceMatrix& d) {
  double sum = 0.0;
  const std::size_t n = d.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) sum += d.at(i, j) * d.at(i, j);
  return sum;
}

struct RestartOutcome {
  Matrix coords;
  double raw_stress;
  std::size_t iterations;
};

RestartOutcome run_restart(const DistanceMatrix& d, const MdsConfig& cfg, std::uint64_t seed) {
  const std::size_t n = d.size();
  const std::size_t k = cfg.n_components;
  Rng rng(seed);
  Matrix coords(n, k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < k; ++c) coords(i, c) = rng.uniform(-0.5, 0.5);

  double prev = raw_stress(coords, d);
  std::size_t iterations = 0;
  for (std::size_t t = 0; t < cfg.max_iterations; ++t) {
    coords = guttman_step(coords, d);
    double cur = raw_stress(coords, d);
    ++iterations;
    if (prev == 0.0) break;
    if ((prev - cur) / prev < cfg.convergence_eps) {
      prev = cur;
      break;
    }
    prev = cur;
  }
  return {std::move(coords), prev, iterations};
}

}  // namespace

double raw_stress(const Matrix& coords, const DistanceMatrix& d) {
  const std::size_t n = d.size();
  Matrix dist = config_distances(coords);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double e = d.at(i, j) - dist(i, j);
      sum += e * e;
    }
  }
  return sum;
}

Matrix guttman_step(const Matrix& coords, const DistanceMatrix& d) {
  const std::size_t n = coords.rows();
  const std::size_t k = coords.cols();
  Matrix dist = config_distances(coords);

  // B is formed row by row; the diagonal entry is minus the row sum of the
  // off-diagonal entries, so B has zero row sums and the update stays
  // translation-free.
  Matrix next(n, k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double dij = dist(i, j);
      double b = dij == 0.0 ? 0.0 : -d.at(i, j) / dij;
      diag -= b;
      for (std::size_t c = 0; c < k; ++c) next(i, c) += b * coords(j, c);
    }
    for (std::size_t c = 0; c < k; ++c)
      next(i, c) = (next(i, c) + diag * coords(i, c)) / static_cast<double>(n);
  }
  return next;
}

EmbeddingResult smacof(const DistanceMatrix& d, const MdsConfig& cfg) {
  const std::size_t n = d.size();
  if (cfg.n_components < 1) throw Error("n_components must be at least 1");
  if (cfg.n_restarts < 1) throw Error("n_restarts must be at least 1");
  if (cfg.max_iterations < 1) throw Error("max_iterations must be at least 1");

  double ssq = sum_squared_dissimilarities(d);
  if (ssq == 0.0) throw Error("all-zero dissimilarity matrix");

  EmbeddingResult best;
  double best_stress = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < cfg.n_restarts; ++r) {
    RestartOutcome outcome = run_restart(d, cfg, derive_seed(cfg.rng_seed, r));
    if (outcome.raw_stress < best_stress) {
      best_stress = outcome.raw_stress;
      best.coords = std::move(outcome.coords);
      best.iterations_used = outcome.iterations;
      best.restart_index = r;
    }
  }

  center_columns(best.coords);
  best.items = d.items();
  best.n_components = cfg.n_components;
  // Stress is reported for the centered coordinates it ships with.
  best.raw_stress = raw_stress(best.coords, d);
  best.stress1 = std::sqrt(best.raw_stress / ssq);
  if (n < cfg.n_components + 1)
    best.warning = "n_components = " + std::to_string(cfg.n_components) +
                   " with only " + std::to_string(n) + " items; k <= n - 1 is recommended";
  return best;
}

std::vector<SweepRow> stress_sweep(const DistanceMatrix& d, std::size_t k_max, MdsConfig cfg) {
  const std::size_t n = d.size();
  if (k_max < 1 || k_max > n - 1)
    throw Error("k_max must be in [1, n-1], got " + std::to_string(k_max) + " for n = " +
                std::to_string(n));
  std::vector<SweepRow> rows;
  rows.reserve(k_max);
  for (std::size_t k = 1; k <= k_max; ++k) {
    cfg.n_components = k;
    EmbeddingResult e = smacof(d, cfg);
    rows.push_back({k, e.raw_stress, e.stress1});
  }
  return rows;
}

void save_coords_csv(const EmbeddingResult& e, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path.string());
  std::vector<std::string> header{"label"};
  for (std::size_t c = 0; c < e.n_components; ++c)
    header.push_back("x" + std::to_string(c + 1));
  out << csv::join_row(header) << "\n";
  for (std::size_t i = 0; i < e.items.size(); ++i) {
    std::vector<std::string> row{e.items.label(i)};
    for (std::size_t c = 0; c < e.n_components; ++c)
      row.push_back(format_double(e.coords(i, c)));
    out << csv::join_row(row) << "\n";
  }
  if (!out) throw Error("write failed: " + path.string());
}

Coords load_coords_csv(const std::filesystem::path& path) {
  auto rows = csv::read_file(path);
  if (rows.size() < 2) throw Error("coordinates CSV needs a header and data rows: " +
                                   path.string());
  const std::size_t width = rows[0].size();
  if (width < 2) throw Error("coordinates CSV needs at least one coordinate column: " +
                             path.string());
  std::vector<std::string> labels;
  Matrix values(rows.size() - 1, width - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != width)
      throw Error("ragged row " + std::to_string(r + 1) + " in " + path.string());
    labels.push_back(rows[r][0]);
    for (std::size_t c = 1; c < width; ++c)
      values(r - 1, c - 1) = csv::parse_cell(rows[r][c], r + 1, c + 1);
  }
  return {ItemSet(std::move(labels)), std::move(values)};
}

void save_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path.string());
  out << "k,raw_stress,stress1\n";
  for (const auto& row : rows)
    out << row.k << "," << format_double(row.raw_stress) << "," << format_double(row.stress1)
        << "\n";
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace odormap
