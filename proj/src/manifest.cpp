#include "odormap/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "odormap/error.hpp"
#include "odormap/harvester.hpp"
#include "odormap/rng.hpp"
#include "odormap/version.hpp"

namespace odormap {

std::string file_hash_hex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file for hashing: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(buffer.str())));
  return std::string("fnv1a64:") + hex;
}

void RunManifest::write(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["command"] = command;
  j["argv"] = argv;
  auto& ins = j["inputs"] = nlohmann::json::object();
  for (const auto& [p, h] : inputs) ins[p] = h;
  j["outputs"] = outputs;
  j["seeds"] = seeds;
  j["tool_version"] = tool_version.empty() ? ODORMAP_VERSION : tool_version;
  j["timestamp_utc"] = timestamp_utc.empty() ? utc_now_iso8601() : timestamp_utc;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write manifest: " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw Error("write failed: " + path.string());
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open manifest: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    for (const auto& [p, h] : j.at("inputs").items())
      m.inputs.emplace_back(p, h.get<std::string>());
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    if (j.contains("seeds"))
      m.seeds = j.at("seeds").get<std::map<std::string, std::uint64_t>>();
    m.tool_version = j.value("tool_version", "");
    m.timestamp_utc = j.value("timestamp_utc", "");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid manifest " + path.string() + ": " + e.what());
  }
}

}  // namespace odormap
