#pragma once

#include <string>
#include <string_view>

#include "odormap/core_data.hpp"

namespace odormap {

enum class MetricKind { euclidean, correlation, cosine };

MetricKind metric_kind_from_token(std::string_view token);
std::string_view metric_token(MetricKind kind);

enum class ProfileAxis { items, attributes };

ProfileAxis profile_axis_from_token(std::string_view token);
std::string_view axis_token(ProfileAxis axis);

// Pairwise distances between the vectors of the selected axis:
//   euclidean:   sqrt(sum_k (u_k - v_k)^2)
//   cosine:      1 - (u.v) / (|u| |v|)
//   correlation: 1 - Pearson r(u, v)
// The resulting metric_tag is "<metric>:<axis>". Zero-norm vectors under
// cosine and zero-variance vectors under correlation are rejected with the
// offending label.
DistanceMatrix pairwise_distances(const ProfileMatrix& p, ProfileAxis axis, MetricKind metric);

}  // namespace odormap
