#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "odormap/rng.hpp"

namespace oracle {

using odormap::DistanceMatrix;
using odormap::ItemSet;
using odormap::Matrix;
using odormap::Merge;
using odormap::ProfileMatrix;
using odormap::Rng;

double euclidean(const std::vector<double>& u, const std::vector<double>& v) {
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) acc += (u[k] - v[k]) * (u[k] - v[k]);
  return std::sqrt(acc);
}

double cosine(const std::vector<double>& u, const std::vector<double>& v) {
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    dot += u[k] * v[k];
    uu += u[k] * u[k];
    vv += v[k] * v[k];
  }
  double c = dot / (std::sqrt(uu) * std::sqrt(vv));
  c = std::min(1.0, std::max(-1.0, c));
  return 1.0 - c;
}

double correlation(const std::vector<double>& u, const std::vector<double>& v) {
  const double m = static_cast<double>(u.size());
  double mu = 0.0, mv = 0.0;
  for (double x : u) mu += x;
  for (double x : v) mv += x;
  mu /= m;
  mv /= m;
  double num = 0.0, du2 = 0.0, dv2 = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    num += (u[k] - mu) * (v[k] - mv);
    du2 += (u[k] - mu) * (u[k] - mu);
    dv2 += (v[k] - mv) * (v[k] - mv);
  }
  double r = num / std::sqrt(du2 * dv2);
  r = std::min(1.0, std::max(-1.0, r));
  return 1.0 - r;
}

std::vector<Merge> upgma(const Matrix& dist) {
  const std::size_t n = dist.rows();
  // id -> leaf members (ascending); inactive entries are emptied.
  std::vector<std::vector<std::size_t>> members(n);
  std::vector<std::size_t> alive;
  for (std::size_t i = 0; i < n; ++i) {
    members[i] = {i};
    alive.push_back(i);
  }

  std::vector<Merge> merges;
  for (std::size_t step = 0; step < n - 1; ++step) {
    std::sort(alive.begin(), alive.end());
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_a = 0, best_b = 0;
    for (std::size_t x = 0; x < alive.size(); ++x) {
      for (std::size_t y = x + 1; y < alive.size(); ++y) {
        const auto& ma = members[alive[x]];
        const auto& mb = members[alive[y]];
        double sum = 0.0;
        for (std::size_t a : ma)
          for (std::size_t b : mb) sum += dist(a, b);
        double mean = sum / static_cast<double>(ma.size() * mb.size());
        if (mean < best) {
          best = mean;
          best_a = alive[x];
          best_b = alive[y];
        }
      }
    }

    std::size_t fresh = n + step;
    members.emplace_back();
    members[fresh].reserve(members[best_a].size() + members[best_b].size());
    for (std::size_t a : members[best_a]) members[fresh].push_back(a);
    for (std::size_t b : members[best_b]) members[fresh].push_back(b);
    std::sort(members[fresh].begin(), members[fresh].end());
    merges.push_back({best_a, best_b, best, members[fresh].size()});

    alive.erase(std::remove(alive.begin(), alive.end(), best_a), alive.end());
    alive.erase(std::remove(alive.begin(), alive.end(), best_b), alive.end());
    alive.push_back(fresh);
    members[best_a].clear();
    members[best_b].clear();
  }
  return merges;
}

double triangle_1d_optimal_raw_stress(double grid_step) {
  double best = std::numeric_limits<double>::infinity();
  for (double a = -2.0; a <= 2.0; a += grid_step) {
    for (double b = -2.0; b <= 2.0; b += grid_step) {
      double e01 = 1.0 - std::fabs(a);
      double e02 = 1.0 - std::fabs(b);
      double e12 = 1.0 - std::fabs(a - b);
      double stress = e01 * e01 + e02 * e02 + e12 * e12;
      best = std::min(best, stress);
    }
  }
  return best;
}

Matrix random_points(std::uint64_t seed, std::size_t n, std::size_t dims, double lo, double hi) {
  Rng rng(seed);
  Matrix points(n, dims);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dims; ++d) points(i, d) = rng.uniform(lo, hi);
  return points;
}

DistanceMatrix distances_from_points(const Matrix& points, std::string tag) {
  const std::size_t n = points.rows();
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("p" + std::to_string(i + 1));
  Matrix values(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t d = 0; d < points.cols(); ++d)
        acc += (points(i, d) - points(j, d)) * (points(i, d) - points(j, d));
      double dist = std::sqrt(acc);
      values(i, j) = dist;
      values(j, i) = dist;
    }
  }
  return {ItemSet(std::move(labels)), std::move(values), std::move(tag)};
}

DistanceMatrix random_distance_matrix(std::uint64_t seed, std::size_t n, std::string tag) {
  Rng rng(seed);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("i" + std::to_string(i + 1));
  Matrix values(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double dist = rng.uniform(0.05, 1.0);
      values(i, j) = dist;
      values(j, i) = dist;
    }
  }
  return {ItemSet(std::move(labels)), std::move(values), std::move(tag)};
}

ProfileMatrix random_profile(std::uint64_t seed, std::size_t items, std::size_t dims) {
  Rng rng(seed);
  std::vector<std::string> item_labels, attr_labels;
  for (std::size_t i = 0; i < items; ++i) item_labels.push_back("item" + std::to_string(i + 1));
  for (std::size_t d = 0; d < dims; ++d) attr_labels.push_back("attr" + std::to_string(d + 1));
  Matrix values(items, dims);
  for (std::size_t i = 0; i < items; ++i)
    for (std::size_t d = 0; d < dims; ++d) values(i, d) = rng.uniform(0.0, 5.0);
  return {ItemSet(std::move(item_labels)), ItemSet(std::move(attr_labels)), std::move(values)};
}

}  // namespace oracle
