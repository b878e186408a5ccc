#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "odormap/clustering.hpp"
#include "odormap/core_data.hpp"
#include "odormap/embedding.hpp"

namespace odormap {

// Group highlighting for plots: item label -> group name, group -> color.
// Groups without an explicit color take palette colors in first-appearance
// order; unlisted items get the default color.
class GroupSpec {
 public:
  GroupSpec() = default;

  // CSV with header "label,group,color"; the color column may be empty.
  static GroupSpec load_csv(const std::filesystem::path& path);

  void add(const std::string& label, const std::string& group, const std::string& color = "");

  bool empty() const { return entries_.empty(); }
  const std::string* group_of(const std::string& label) const;
  std::string color_of_group(const std::string& group) const;

  // Groups in first-appearance order.
  std::vector<std::string> groups() const;

  // Throws when a labeled item is missing from the set being plotted.
  void validate_against(const ItemSet& items) const;

 private:
  struct Entry {
    std::string label;
    std::string group;
  };
  std::vector<Entry> entries_;
  std::vector<std::pair<std::string, std::string>> group_colors_;  // ordered
};

// 2-D scatter of an embedding: one labeled point per item, colored by
// group, axes scaled to the data extent with a 5% margin. Byte-identical
// output for identical inputs.
void render_map(const EmbeddingResult& e, const GroupSpec& groups,
                const std::filesystem::path& out);

// Dendrogram with leaves ordered by recursive left-before-right traversal;
// leaf labels colored by group.
void render_dendrogram(const Dendrogram& dg, const ItemSet& labels, const GroupSpec& groups,
                       const std::filesystem::path& out);

}  // namespace odormap
