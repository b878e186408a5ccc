#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "odormap/core_data.hpp"

namespace odormap {

struct MdsConfig {
  std::size_t n_components = 2;
  std::size_t n_restarts = 4;
  std::size_t max_iterations = 300;
  double convergence_eps = 1e-6;  // relative raw-stress change threshold
  std::uint64_t rng_seed = 0;
};

struct EmbeddingResult {
  ItemSet items;
  Matrix coords;  // n x k, column means zero
  double raw_stress = 0.0;
  double stress1 = 0.0;  // sqrt(raw_stress / sum of squared dissimilarities)
  std::size_t n_components = 0;
  std::size_t iterations_used = 0;
  std::size_t restart_index = 0;
  std::string warning;  // set when n < k + 1
};

// Raw stress of a configuration: sum over i<j of (delta_ij - d_ij(X))^2.
double raw_stress(const Matrix& coords, const DistanceMatrix& d);

// One Guttman majorization update X <- (1/n) B(X) X with
// b_ij = -delta_ij / dist_ij(X) for i != j (0 when dist_ij = 0) and
// b_ii = -sum_{j != i} b_ij. Never increases raw stress.
Matrix guttman_step(const Matrix& coords, const DistanceMatrix& d);

// Metric MDS via SMACOF. Each restart starts from seeded uniform coordinates
// in [-0.5, 0.5]^k and iterates until the relative raw-stress decrease drops
// below convergence_eps or max_iterations is hit; the restart with minimal
// raw stress wins (ties to the lower restart index). Winning coordinates are
// re-centered.
EmbeddingResult smacof(const DistanceMatrix& d, const MdsConfig& cfg);

struct SweepRow {
  std::size_t k;
  double raw_stress;
  double stress1;
};

// Runs smacof for k = 1..k_max with the same seed per dimension.
std::vector<SweepRow> stress_sweep(const DistanceMatrix& d, std::size_t k_max, MdsConfig cfg);

// Coordinates CSV: header "label,x1,...,xk".
void save_coords_csv(const EmbeddingResult& e, const std::filesystem::path& path);

struct Coords {
  ItemSet items;
  Matrix values;
};

Coords load_coords_csv(const std::filesystem::path& path);

// Sweep CSV: header "k,raw_stress,stress1".
void save_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

}  // namespace odormap
