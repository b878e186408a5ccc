#include "odormap/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "csv_util.hpp"
#include "odormap/error.hpp"

namespace odormap {

namespace {

// Purple/green/red leads the palette (the grouping convention for maps),
// followed by light blue/yellow/red and a few spares.
const char* const kPalette[] = {"#7b2d8b", "#2e8b57", "#c0392b", "#89cff0",
                                "#e1c542", "#16a085", "#d35400", "#7f8c8d"};
constexpr char kDefaultColor[] = "#9aa5b1";

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

void write_svg(const std::filesystem::path& path, const std::string& body, double width,
               double height) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt2(width)
      << "\" height=\"" << fmt2(height) << "\" viewBox=\"0 0 " << fmt2(width) << " "
      << fmt2(height) << "\">\n"
      << body << "</svg>\n";
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace

GroupSpec GroupSpec::load_csv(const std::filesystem::path& path) {
  auto rows = csv::read_file(path);
  if (rows.empty()) throw Error("empty group file: " + path.string());
  GroupSpec spec;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() < 2)
      throw Error("group row " + std::to_string(r + 1) + " needs at least label,group in " +
                  path.string());
    std::string color = rows[r].size() > 2 ? trim(rows[r][2]) : "";
    spec.add(trim(rows[r][0]), trim(rows[r][1]), color);
  }
  return spec;
}

void GroupSpec::add(const std::string& label, const std::string& group,
                    const std::string& color) {
  if (label.empty() || group.empty()) throw Error("group entries need a label and a group name");
  entries_.push_back({label, group});
  auto it = std::find_if(group_colors_.begin(), group_colors_.end(),
                         [&](const auto& gc) { return gc.first == group; });
  if (it == group_colors_.end()) {
    std::string resolved = color;
    if (resolved.empty()) {
      std::size_t idx = group_colors_.size() % std::size(kPalette);
      resolved = kPalette[idx];
    }
    group_colors_.emplace_back(group, resolved);
  } else if (!color.empty()) {
    it->second = color;
  }
}

const std::string* GroupSpec::group_of(const std::string& label) const {
  for (const auto& e : entries_)
    if (e.label == label) return &e.group;
  return nullptr;
}

std::string GroupSpec::color_of_group(const std::string& group) const {
  for (const auto& gc : group_colors_)
    if (gc.first == group) return gc.second;
  return kDefaultColor;
}

std::vector<std::string> GroupSpec::groups() const {
  std::vector<std::string> out;
  out.reserve(group_colors_.size());
  for (const auto& gc : group_colors_) out.push_back(gc.first);
  return out;
}

void GroupSpec::validate_against(const ItemSet& items) const {
  for (const auto& e : entries_)
    if (!items.index_of(e.label))
      throw Error("unknown label in group spec: '" + e.label + "'");
}

void render_map(const EmbeddingResult& e, const GroupSpec& groups,
                const std::filesystem::path& out) {
  if (e.n_components != 2)
    throw Error("map rendering needs a 2-D embedding, got k = " +
                std::to_string(e.n_components));
  groups.validate_against(e.items);

  const std::size_t n = e.items.size();
  const double width = 800.0, height = 600.0;
  const double pad = 30.0;  // room for labels at the border

  double min_x = e.coords(0, 0), max_x = e.coords(0, 0);
  double min_y = e.coords(0, 1), max_y = e.coords(0, 1);
  for (std::size_t i = 1; i < n; ++i) {
    min_x = std::min(min_x, e.coords(i, 0));
    max_x = std::max(max_x, e.coords(i, 0));
    min_y = std::min(min_y, e.coords(i, 1));
    max_y = std::max(max_y, e.coords(i, 1));
  }
  // 5% margin around the data extent.
  double span_x = max_x - min_x, span_y = max_y - min_y;
  if (span_x == 0.0) span_x = 1.0;
  if (span_y == 0.0) span_y = 1.0;
  min_x -= 0.05 * span_x;
  max_x += 0.05 * span_x;
  min_y -= 0.05 * span_y;
  max_y += 0.05 * span_y;

  auto sx = [&](double x) { return pad + (x - min_x) / (max_x - min_x) * (width - 2 * pad); };
  auto sy = [&](double y) { return height - pad - (y - min_y) / (max_y - min_y) * (height - 2 * pad); };

  std::string body;
  body += "<rect x=\"0\" y=\"0\" width=\"" + fmt2(width) + "\" height=\"" + fmt2(height) +
          "\" fill=\"white\"/>\n";
  body += "<rect x=\"" + fmt2(pad) + "\" y=\"" + fmt2(pad) + "\" width=\"" +
          fmt2(width - 2 * pad) + "\" height=\"" + fmt2(height - 2 * pad) +
          "\" fill=\"none\" stroke=\"#cccccc\"/>\n";

  for (std::size_t i = 0; i < n; ++i) {
    const std::string& label = e.items.label(i);
    const std::string* group = groups.group_of(label);
    std::string color = group ? groups.color_of_group(*group) : kDefaultColor;
    double x = sx(e.coords(i, 0));
    double y = sy(e.coords(i, 1));
    body += "<circle cx=\"" + fmt2(x) + "\" cy=\"" + fmt2(y) + "\" r=\"4\" fill=\"" + color +
            "\"/>\n";
    body += "<text x=\"" + fmt2(x + 5.0) + "\" y=\"" + fmt2(y - 5.0) +
            "\" font-size=\"10\" font-family=\"sans-serif\" fill=\"#333333\">" +
            xml_escape(label) + "</text>\n";
  }

  // Legend, one row per group in first-appearance order.
  double ly = pad + 14.0;
  for (const auto& group : groups.groups()) {
    body += "<circle cx=\"" + fmt2(width - pad - 110.0) + "\" cy=\"" + fmt2(ly - 4.0) +
            "\" r=\"5\" fill=\"" + groups.color_of_group(group) + "\"/>\n";
    body += "<text x=\"" + fmt2(width - pad - 100.0) + "\" y=\"" + fmt2(ly) +
            "\" font-size=\"11\" font-family=\"sans-serif\" fill=\"#333333\">" +
            xml_escape(group) + "</text>\n";
    ly += 16.0;
  }

  write_svg(out, body, width, height);
}

void render_dendrogram(const Dendrogram& dg, const ItemSet& labels, const GroupSpec& groups,
                       const std::filesystem::path& out) {
  const std::size_t n = dg.n_leaves;
  if (labels.size() != n)
    throw Error("label count " + std::to_string(labels.size()) +
                " does not match leaf count " + std::to_string(n));
  groups.validate_against(labels);

  // Leaf order by recursive left-before-right traversal from the root.
  std::vector<std::size_t> leaf_order;
  leaf_order.reserve(n);
  {
    std::vector<std::size_t> stack{n + dg.merges.size() - 1};
    while (!stack.empty()) {
      std::size_t node = stack.back();
      stack.pop_back();
      if (node < n) {
        leaf_order.push_back(node);
      } else {
        const Merge& m = dg.merges[node - n];
        // Right child pushed first so the left subtree is walked first.
        stack.push_back(m.right_id);
        stack.push_back(m.left_id);
      }
    }
  }

  const double leaf_spacing = 14.0;
  const double margin = 40.0;
  const double label_space = 110.0;
  const double width = margin * 2 + leaf_spacing * static_cast<double>(n);
  const double plot_height = 420.0;
  const double height = margin + plot_height + label_space;

  double max_height = 0.0;
  for (const auto& m : dg.merges) max_height = std::max(max_height, m.distance);
  if (max_height == 0.0) max_height = 1.0;

  // Node positions: leaves at their slot, internal nodes midway between
  // children, at their merge height.
  std::vector<double> node_x(n + dg.merges.size(), 0.0);
  std::vector<double> node_h(n + dg.merges.size(), 0.0);
  for (std::size_t slot = 0; slot < n; ++slot)
    node_x[leaf_order[slot]] = margin + leaf_spacing * (static_cast<double>(slot) + 0.5);
  for (std::size_t m = 0; m < dg.merges.size(); ++m) {
    const Merge& merge = dg.merges[m];
    node_x[n + m] = (node_x[merge.left_id] + node_x[merge.right_id]) / 2.0;
    node_h[n + m] = merge.distance;
  }

  auto sy = [&](double h) { return margin + plot_height - h / max_height * plot_height; };

  std::string body;
  body += "<rect x=\"0\" y=\"0\" width=\"" + fmt2(width) + "\" height=\"" + fmt2(height) +
          "\" fill=\"white\"/>\n";

  for (std::size_t m = 0; m < dg.merges.size(); ++m) {
    const Merge& merge = dg.merges[m];
    double y = sy(node_h[n + m]);
    double xl = node_x[merge.left_id];
    double xr = node_x[merge.right_id];
    double yl = sy(node_h[merge.left_id]);
    double yr = sy(node_h[merge.right_id]);
    body += "<polyline fill=\"none\" stroke=\"#555555\" points=\"" + fmt2(xl) + "," + fmt2(yl) +
            " " + fmt2(xl) + "," + fmt2(y) + " " + fmt2(xr) + "," + fmt2(y) + " " + fmt2(xr) +
            "," + fmt2(yr) + "\"/>\n";
  }

  for (std::size_t slot = 0; slot < n; ++slot) {
    std::size_t leaf = leaf_order[slot];
    const std::string& label = labels.label(leaf);
    const std::string* group = groups.group_of(label);
    std::string color = group ? groups.color_of_group(*group) : "#333333";
    double x = node_x[leaf];
    double y = margin + plot_height + 12.0;
    body += "<text x=\"" + fmt2(x) + "\" y=\"" + fmt2(y) +
            "\" font-size=\"10\" font-family=\"sans-serif\" fill=\"" + color +
            "\" transform=\"rotate(90 " + fmt2(x) + " " + fmt2(y) + ")\">" + xml_escape(label) +
            "</text>\n";
  }

  write_svg(out, body, width, height);
}

}  // namespace odormap
