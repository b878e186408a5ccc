#include "odormap/metrics.hpp"

#include <cmath>
#include <span>

#include "odormap/error.hpp"

namespace odormap {

namespace {

double euclidean_distance(std::span<const double> u, std::span<const double> v) {
  double sum = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    double d = u[k] - v[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    dot += u[k] * v[k];
    nu += u[k] * u[k];
    nv += v[k] * v[k];
  }
  double ratio = dot / std::sqrt(nu * nv);
  // |cos| <= 1 holds mathematically; rounding can push the ratio past it.
  if (ratio > 1.0) ratio = 1.0;
  if (ratio < -1.0) ratio = -1.0;
  return 1.0 - ratio;
}

double correlation_distance(std::span<const double> u, std::span<const double> v) {
  const std::size_t m = u.size();
  double mu = 0.0, mv = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    mu += u[k];
    mv += v[k];
  }
  mu /= static_cast<double>(m);
  mv /= static_cast<double>(m);
  double cov = 0.0, su = 0.0, sv = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    double du = u[k] - mu;
    double dv = v[k] - mv;
    cov += du * dv;
    su += du * du;
    sv += dv * dv;
  }
  double r = cov / std::sqrt(su * sv);
  if (r > 1.0) r = 1.0;
  if (r < -1.0) r = -1.0;
  return 1.0 - r;
}

}  // namespace

MetricKind metric_kind_from_token(std::string_view token) {
  if (token == "euclidean") return MetricKind::euclidean;
  if (token == "correlation") return MetricKind::correlation;
  if (token == "cosine") return MetricKind::cosine;
  throw Error("unknown metric '" + std::string(token) +
              "' (expected euclidean, correlation or cosine)");
}

std::string_view metric_token(MetricKind kind) {
  switch (kind) {
    case MetricKind::euclidean: return "euclidean";
    case MetricKind::correlation: return "correlation";
    case MetricKind::cosine: return "cosine";
  }
  throw Error("invalid metric kind");
}

ProfileAxis profile_axis_from_token(std::string_view token) {
  if (token == "items") return ProfileAxis::items;
  if (token == "attributes") return ProfileAxis::attributes;
  throw Error("unknown axis '" + std::string(token) + "' (expected items or attributes)");
}

std::string_view axis_token(ProfileAxis axis) {
  return axis == ProfileAxis::items ? "items" : "attributes";
}

DistanceMatrix pairwise_distances(const ProfileMatrix& p, ProfileAxis axis, MetricKind metric) {
  // Vectors are rows of the profile for the items axis, columns for the
  // attributes axis.
  const Matrix grid =
      axis == ProfileAxis::items ? p.values() : p.values().transposed();
  const ItemSet& labels = axis == ProfileAxis::items ? p.items() : p.attributes();

  const std::size_t n = grid.rows();
  const std::size_t dim = grid.cols();
  if (n < 2)
    throw Error("axis '" + std::string(axis_token(axis)) + "' has fewer than 2 vectors");
  if (dim < 1) throw Error("vectors have length 0");
  if (metric == MetricKind::correlation && dim < 2)
    throw Error("correlation distance needs vectors of length >= 2");

  auto vec = [&](std::size_t i) {
    return std::span<const double>(grid.data().data() + i * dim, dim);
  };

  // Degenerate vectors are rejected up front so the error names the label
  // rather than a pair.
  for (std::size_t i = 0; i < n; ++i) {
    auto u = vec(i);
    if (metric == MetricKind::cosine) {
      double norm = 0.0;
      for (double x : u) norm += x * x;
      if (norm == 0.0) throw Error("zero-norm vector under cosine: '" + labels.label(i) + "'");
    } else if (metric == MetricKind::correlation) {
      double mean = 0.0;
      for (double x : u) mean += x;
      mean /= static_cast<double>(dim);
      double var = 0.0;
      for (double x : u) var += (x - mean) * (x - mean);
      if (var == 0.0)
        throw Error("zero-variance vector under correlation: '" + labels.label(i) + "'");
    }
  }

  Matrix values(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = 0.0;
      switch (metric) {
        case MetricKind::euclidean: d = euclidean_distance(vec(i), vec(j)); break;
        case MetricKind::cosine: d = cosine_distance(vec(i), vec(j)); break;
        case MetricKind::correlation: d = correlation_distance(vec(i), vec(j)); break;
      }
      values(i, j) = d;
      values(j, i) = d;
    }
  }

  std::string tag = std::string(metric_token(metric)) + ":" + std::string(axis_token(axis));
  return {labels, std::move(values), std::move(tag)};
}

}  // namespace odormap
