#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "odormap/core_data.hpp"

namespace odormap {

struct ProviderConfig {
  std::string endpoint_url;  // absolute URL of a chat-completions endpoint
  std::string model_name;
  std::string api_key_env;  // name of the env var holding the key; empty for local endpoints
  double temperature = 0.0;
  std::size_t max_parallel = 4;
  double timeout_seconds = 60.0;
  std::size_t max_retries = 3;
  double retry_backoff_seconds = 0.25;  // doubles on every retry
};

struct PairQuery {
  std::string item_a;
  std::string item_b;
  std::string prompt;
};

// A chat endpoint reduced to one call. complete() returns the raw response
// text or throws Error; harvest retries thrown failures. Implementations
// must tolerate concurrent calls.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string complete(const PairQuery& query) = 0;
};

// Placeholders are {a} and {b}; each must occur exactly once.
std::string render_prompt(const std::string& item_a, const std::string& item_b,
                          const std::string& prompt_template);

const std::string& default_prompt_template();

struct ParsedSimilarity {
  double similarity;   // in [0,1]
  std::string warning; // set when the response held conflicting numbers
};

// Extracts the first decimal number token. Values within 1e-9 outside [0,1]
// are clamped; values in (1,100] are read as percentages when no
// decimal-point number <= 1 appears anywhere in the text; everything else
// is rejected.
ParsedSimilarity parse_similarity(const std::string& raw_response);

struct SimilarityRecord {
  std::string item_a;  // item_a < item_b lexicographically
  std::string item_b;
  std::string model_name;
  std::string prompt_hash;  // hash of the rendered prompt
  std::string raw_response;
  double similarity = 0.0;
  std::string timestamp_utc;
  std::string warning;  // optional parse warning
};

// Symmetric similarities in [0,1] with a fixed diagonal of 1.
class SimilarityMatrix {
 public:
  SimilarityMatrix(ItemSet items, Matrix values, std::string model_name);

  const ItemSet& items() const { return items_; }
  const Matrix& values() const { return values_; }
  const std::string& model_name() const { return model_name_; }
  std::size_t size() const { return items_.size(); }
  double at(std::size_t i, std::size_t j) const { return values_(i, j); }

 private:
  ItemSet items_;
  Matrix values_;
  std::string model_name_;
};

struct FailedPair {
  std::string item_a;
  std::string item_b;
  std::string reason;
};

struct HarvestReport {
  std::optional<SimilarityMatrix> matrix;  // set only when every pair is resolved
  std::vector<FailedPair> failed;
  std::size_t pairs_total = 0;
  std::size_t cache_hits = 0;
  std::size_t pairs_requested = 0;    // pairs that needed at least one network call
  std::size_t responses_recorded = 0; // successfully parsed and cached this run
  std::size_t parse_warnings = 0;
  std::size_t corrupt_cache_lines = 0;
};

// Queries every unordered pair not already cached, appending one JSON line
// per response to the cache file as it arrives. Records are keyed by
// (item_a, item_b, model, prompt hash), so re-running against a warm cache
// issues no requests, and a partially failed run resumes where it stopped.
// The matrix is assembled only when every pair has a value.
HarvestReport harvest(const ItemSet& items, ChatProvider& provider, const ProviderConfig& cfg,
                      const std::filesystem::path& cache_path,
                      const std::string& prompt_template = default_prompt_template());

// Deterministic offline provider: similarity is a fixed symmetric function
// of the two labels (character-bigram overlap mixed with seeded hash
// jitter). Identical labels always score 1.
std::unique_ptr<ChatProvider> mock_provider(std::uint64_t seed);

// OpenAI-compatible chat-completions client: POST {endpoint_url} with
// {model, messages, temperature}, bearer token from cfg.api_key_env when
// set. Works against hosted APIs and local servers exposing the same
// schema.
std::unique_ptr<ChatProvider> http_provider(const ProviderConfig& cfg);

// d_ij = 1 - s_ij; metric_tag is the model name.
DistanceMatrix similarity_to_distance(const SimilarityMatrix& s);

void save_similarity_csv(const SimilarityMatrix& s, const std::filesystem::path& path);
SimilarityMatrix load_similarity_csv(const std::filesystem::path& path);

std::string utc_now_iso8601();

}  // namespace odormap
