#include "odormap/clustering.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "odormap/error.hpp"

namespace odormap {

namespace {

struct Cluster {
  std::size_t id;
  std::vector<std::size_t> members;  // leaf ids, ascending
};

// Mean leaf-to-leaf distance between two clusters. Both member lists are
// ascending; the outer loop runs over the lower-id cluster so the summation
// order is canonical.
double average_distance(const DistanceMatrix& d, const Cluster& lo, const Cluster& hi) {
  double sum = 0.0;
  for (std::size_t a : lo.members)
    for (std::size_t b : hi.members) sum += d.at(a, b);
  return sum / static_cast<double>(lo.members.size() * hi.members.size());
}

}  // namespace

Dendrogram average_linkage(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  if (n < 2) throw Error("clustering needs at least 2 items, got " + std::to_string(n));

  // Active clusters stay sorted by id: leaves first, then each new cluster
  // appended with the next id.
  std::vector<Cluster> active;
  active.reserve(n);
  for (std::size_t i = 0; i < n; ++i) active.push_back({i, {i}});

  Dendrogram dg;
  dg.n_leaves = n;
  dg.merges.reserve(n - 1);

  for (std::size_t step = 0; step < n - 1; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_p = 0, best_q = 0;
    for (std::size_t p = 0; p < active.size(); ++p) {
      for (std::size_t q = p + 1; q < active.size(); ++q) {
        double dist = average_distance(d, active[p], active[q]);
        // Strict less-than keeps the earliest (smallest id) pair on ties.
        if (dist < best) {
          best = dist;
          best_p = p;
          best_q = q;
        }
      }
    }

    Cluster merged;
    merged.id = n + step;
    merged.members.resize(active[best_p].members.size() + active[best_q].members.size());
    std::merge(active[best_p].members.begin(), active[best_p].members.end(),
               active[best_q].members.begin(), active[best_q].members.end(),
               merged.members.begin());

    dg.merges.push_back({active[best_p].id, active[best_q].id, best, merged.members.size()});

    active.erase(active.begin() + best_q);
    active.erase(active.begin() + best_p);
    active.push_back(std::move(merged));
  }
  return dg;
}

std::vector<std::size_t> cut_tree(const Dendrogram& dg, std::size_t k) {
  const std::size_t n = dg.n_leaves;
  if (k < 1 || k > n)
    throw Error("cut_tree: k must be in [1, " + std::to_string(n) + "], got " +
                std::to_string(k));

  // Union-find over all node ids; apply the first n-k merges.
  std::vector<std::size_t> parent(n + dg.merges.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t m = 0; m + k < n; ++m) {
    std::size_t node = n + m;
    parent[find(dg.merges[m].left_id)] = node;
    parent[find(dg.merges[m].right_id)] = node;
  }

  // Number clusters 0..k-1 in order of their smallest leaf id.
  std::vector<std::size_t> assignment(n);
  std::vector<std::size_t> root_to_cluster(parent.size(), SIZE_MAX);
  std::size_t next = 0;
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    std::size_t root = find(leaf);
    if (root_to_cluster[root] == SIZE_MAX) root_to_cluster[root] = next++;
    assignment[leaf] = root_to_cluster[root];
  }
  return assignment;
}

void save_dendrogram_json(const Dendrogram& dg, const ItemSet& labels,
                          const std::filesystem::path& path) {
  if (labels.size() != dg.n_leaves)
    throw Error("label count " + std::to_string(labels.size()) + " does not match leaf count " +
                std::to_string(dg.n_leaves));
  nlohmann::json j;
  j["n_leaves"] = dg.n_leaves;
  j["labels"] = labels.labels();
  auto& merges = j["merges"] = nlohmann::json::array();
  for (const auto& m : dg.merges)
    merges.push_back({m.left_id, m.right_id, m.distance, m.size});
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw Error("write failed: " + path.string());
}

LabeledDendrogram load_dendrogram_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid dendrogram JSON in " + path.string() + ": " + e.what());
  }
  LabeledDendrogram result;
  try {
    result.tree.n_leaves = j.at("n_leaves").get<std::size_t>();
    result.labels = ItemSet(j.at("labels").get<std::vector<std::string>>());
    for (const auto& m : j.at("merges")) {
      result.tree.merges.push_back({m.at(0).get<std::size_t>(), m.at(1).get<std::size_t>(),
                                    m.at(2).get<double>(), m.at(3).get<std::size_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid dendrogram JSON in " + path.string() + ": " + e.what());
  }
  if (result.labels.size() != result.tree.n_leaves ||
      result.tree.merges.size() + 1 != result.tree.n_leaves)
    throw Error("inconsistent dendrogram JSON in " + path.string());
  return result;
}

void save_linkage_csv(const Dendrogram& dg, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path.string());
  out << "left,right,distance,size\n";
  for (const auto& m : dg.merges)
    out << m.left_id << "," << m.right_id << "," << format_double(m.distance) << "," << m.size
        << "\n";
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace odormap
