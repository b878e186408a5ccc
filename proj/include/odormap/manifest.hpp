#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace odormap {

// Provenance record written next to every file a CLI command produces.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;  // full argument vector, replayable
  std::vector<std::pair<std::string, std::string>> inputs;  // path -> content hash
  std::vector<std::string> outputs;
  std::map<std::string, std::uint64_t> seeds;
  std::string tool_version;
  std::string timestamp_utc;

  void write(const std::filesystem::path& path) const;
  static RunManifest load(const std::filesystem::path& path);
};

// FNV-1a of the file bytes, as "fnv1a64:<hex>".
std::string file_hash_hex(const std::filesystem::path& path);

}  // namespace odormap
