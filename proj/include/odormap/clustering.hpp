#pragma once

#include <filesystem>
#include <vector>

#include "odormap/core_data.hpp"

namespace odormap {

struct Merge {
  std::size_t left_id;   // left_id < right_id
  std::size_t right_id;
  double distance;
  std::size_t size;  // leaves in the merged cluster
};

// Merge history of an agglomerative clustering. Leaves carry ids 0..n-1;
// the cluster created by merges[i] has id n+i.
struct Dendrogram {
  std::size_t n_leaves = 0;
  std::vector<Merge> merges;  // exactly n_leaves - 1 entries
};

// Unweighted average linkage (UPGMA): repeatedly merges the active cluster
// pair with the smallest mean over all cross-pair leaf distances. The
// average accumulates over member pairs in ascending leaf-id order
// (lower-id cluster outer), and ties break on the smallest (left_id,
// right_id), which pins the result bit-for-bit.
Dendrogram average_linkage(const DistanceMatrix& d);

// Cluster assignment per leaf after undoing the last k-1 merges. Clusters
// are numbered 0..k-1 in order of their smallest leaf id.
std::vector<std::size_t> cut_tree(const Dendrogram& dg, std::size_t k);

void save_dendrogram_json(const Dendrogram& dg, const ItemSet& labels,
                          const std::filesystem::path& path);

struct LabeledDendrogram {
  Dendrogram tree;
  ItemSet labels;
};

LabeledDendrogram load_dendrogram_json(const std::filesystem::path& path);

// Conventional 4-column linkage layout: left, right, distance, size.
void save_linkage_csv(const Dendrogram& dg, const std::filesystem::path& path);

}  // namespace odormap
