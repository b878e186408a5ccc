#include "odormap/harvester.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "odormap/error.hpp"
#include "odormap/rng.hpp"

namespace odormap {

namespace {

constexpr char kPlaceholderA[] = "{a}";
constexpr char kPlaceholderB[] = "{b}";

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + needle.size()))
    ++count;
  return count;
}

std::string replace_once(std::string text, const std::string& needle, const std::string& value) {
  text.replace(text.find(needle), needle.size(), value);
  return text;
}

struct NumberToken {
  double value;
  bool has_decimal_point;
};

std::vector<NumberToken> scan_numbers(const std::string& text) {
  std::vector<NumberToken> tokens;
  std::size_t i = 0;
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  while (i < text.size()) {
    std::size_t start = i;
    bool signed_start = (text[i] == '-' || text[i] == '+') && i + 1 < text.size() &&
                        (is_digit(text[i + 1]) || (text[i + 1] == '.' && i + 2 < text.size() &&
                                                   is_digit(text[i + 2])));
    if (!is_digit(text[i]) && !(text[i] == '.' && i + 1 < text.size() && is_digit(text[i + 1])) &&
        !signed_start) {
      ++i;
      continue;
    }
    std::size_t j = i;
    if (text[j] == '-' || text[j] == '+') ++j;
    bool decimal_point = false;
    while (j < text.size() && is_digit(text[j])) ++j;
    if (j < text.size() && text[j] == '.' && j + 1 < text.size() && is_digit(text[j + 1])) {
      decimal_point = true;
      ++j;
      while (j < text.size() && is_digit(text[j])) ++j;
    }
    if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
      std::size_t e = j + 1;
      if (e < text.size() && (text[e] == '-' || text[e] == '+')) ++e;
      if (e < text.size() && is_digit(text[e])) {
        while (e < text.size() && is_digit(text[e])) ++e;
        j = e;
      }
    }
    tokens.push_back({std::strtod(text.substr(start, j - start).c_str(), nullptr),
                      decimal_point});
    i = j;
  }
  return tokens;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Unordered pair key with item_a < item_b.
std::pair<std::string, std::string> canonical_pair(const std::string& a, const std::string& b) {
  return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
}

class MockProvider final : public ChatProvider {
 public:
  explicit MockProvider(std::uint64_t seed) : seed_(seed) {}

  std::string complete(const PairQuery& query) override {
    auto [lo, hi] = canonical_pair(query.item_a, query.item_b);
    if (lo == hi) return "1.0";

    double overlap = bigram_dice(lo, hi);
    std::uint64_t h = derive_seed(seed_, fnv1a64(lo + "\x1f" + hi));
    double jitter = static_cast<double>(mix64(h) >> 11) * 0x1.0p-53;
    double value = 0.65 * overlap + 0.35 * jitter;

    // Response formats are varied deterministically so the parse paths get
    // exercised end to end.
    char buf[64];
    switch (h & 7u) {
      case 0: {
        long pct = std::lround(value * 100.0);
        if (pct >= 2) {
          std::snprintf(buf, sizeof buf, "%ld", pct);
          return buf;
        }
        break;
      }
      case 1:
        std::snprintf(buf, sizeof buf, "The similarity is %.3f.", value);
        return buf;
      default: break;
    }
    std::snprintf(buf, sizeof buf, "%.3f", value);
    return buf;
  }

 private:
  static double bigram_dice(const std::string& a, const std::string& b) {
    std::set<std::string> ba, bb;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) ba.insert(a.substr(i, 2));
    for (std::size_t i = 0; i + 1 < b.size(); ++i) bb.insert(b.substr(i, 2));
    if (ba.empty() && bb.empty()) return 0.0;
    std::size_t common = 0;
    for (const auto& g : ba) common += bb.count(g);
    return 2.0 * static_cast<double>(common) / static_cast<double>(ba.size() + bb.size());
  }

  std::uint64_t seed_;
};

class HttpChatProvider final : public ChatProvider {
 public:
  explicit HttpChatProvider(const ProviderConfig& cfg) : cfg_(cfg) {
    if (cfg.endpoint_url.rfind("http://", 0) != 0 && cfg.endpoint_url.rfind("https://", 0) != 0)
      throw Error("endpoint_url must be an absolute http(s) URL: " + cfg.endpoint_url);
    std::size_t scheme_end = cfg.endpoint_url.find("://") + 3;
    std::size_t path_start = cfg.endpoint_url.find('/', scheme_end);
    if (path_start == std::string::npos) {
      base_ = cfg.endpoint_url;
      path_ = "/";
    } else {
      base_ = cfg.endpoint_url.substr(0, path_start);
      path_ = cfg.endpoint_url.substr(path_start);
    }
    if (!cfg.api_key_env.empty()) {
      // An unset variable means no bearer token; local endpoints need none.
      const char* key = std::getenv(cfg.api_key_env.c_str());
      if (key != nullptr) api_key_ = key;
    }
  }

  std::string complete(const PairQuery& query) override {
    nlohmann::json body{
        {"model", cfg_.model_name},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", query.prompt}}})},
        {"temperature", cfg_.temperature},
    };

    httplib::Client client(base_);
    auto connect_s = static_cast<time_t>(cfg_.timeout_seconds);
    auto connect_us = static_cast<time_t>((cfg_.timeout_seconds - static_cast<double>(connect_s)) * 1e6);
    client.set_connection_timeout(connect_s, connect_us);
    client.set_read_timeout(connect_s, connect_us);
    client.set_write_timeout(connect_s, connect_us);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res)
      throw Error("connection to " + base_ + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw Error("HTTP " + std::to_string(res->status) + " from " + cfg_.endpoint_url + ": " +
                  res->body.substr(0, 200));

    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error("malformed chat-completions response: " + std::string(e.what()));
    }
  }

 private:
  ProviderConfig cfg_;
  std::string base_;
  std::string path_;
  std::string api_key_;
};

nlohmann::json record_to_json(const SimilarityRecord& rec) {
  nlohmann::json j{{"item_a", rec.item_a},       {"item_b", rec.item_b},
                   {"model", rec.model_name},    {"prompt_hash", rec.prompt_hash},
                   {"raw_response", rec.raw_response}, {"similarity", rec.similarity},
                   {"timestamp", rec.timestamp_utc}};
  if (!rec.warning.empty()) j["warning"] = rec.warning;
  return j;
}

}  // namespace

std::string render_prompt(const std::string& item_a, const std::string& item_b,
                          const std::string& prompt_template) {
  if (count_occurrences(prompt_template, kPlaceholderA) != 1)
    throw Error("prompt template must contain {a} exactly once");
  if (count_occurrences(prompt_template, kPlaceholderB) != 1)
    throw Error("prompt template must contain {b} exactly once");
  return replace_once(replace_once(prompt_template, kPlaceholderA, item_a), kPlaceholderB,
                      item_b);
}

const std::string& default_prompt_template() {
  static const std::string tmpl =
      "How similar do the odors of {a} and {b} smell to a human? "
      "Rate the similarity on a scale from 0 to 1, where 0 means the two smell "
      "completely different and 1 means they smell identical. "
      "Respond with only a single decimal number.";
  return tmpl;
}

ParsedSimilarity parse_similarity(const std::string& raw_response) {
  std::vector<NumberToken> tokens = scan_numbers(raw_response);
  if (tokens.empty()) throw Error("no numeric token in response: '" + raw_response + "'");

  std::string warning;
  for (const auto& t : tokens) {
    if (t.value != tokens[0].value) {
      warning = "ambiguous response with " + std::to_string(tokens.size()) +
                " numeric tokens; first used";
      break;
    }
  }

  double v = tokens[0].value;
  // Formatting noise within 1e-9 of the valid range is clamped before the
  // percentage rule can misread it.
  if (v >= -1e-9 && v <= 1.0 + 1e-9) {
    double clamped = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    return {clamped, warning};
  }
  if (v > 1.0 && v <= 100.0) {
    for (const auto& t : tokens)
      if (t.has_decimal_point && t.value <= 1.0)
        throw Error("cannot determine response scale: '" + raw_response + "'");
    return {v / 100.0, warning};
  }
  throw Error("number outside [0,100] in response: '" + raw_response + "'");
}

SimilarityMatrix::SimilarityMatrix(ItemSet items, Matrix values, std::string model_name)
    : items_(std::move(items)), values_(std::move(values)), model_name_(std::move(model_name)) {
  const std::size_t n = items_.size();
  if (values_.rows() != n || values_.cols() != n)
    throw Error("similarity matrix shape mismatch for model '" + model_name_ + "'");
  for (std::size_t i = 0; i < n; ++i) {
    if (values_(i, i) != 1.0)
      throw Error("similarity diagonal must be 1 at item '" + items_.label(i) + "'");
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = values_(i, j);
      if (v != values_(j, i))
        throw Error("asymmetric similarities between '" + items_.label(i) + "' and '" +
                    items_.label(j) + "'");
      if (!(v >= 0.0 && v <= 1.0))
        throw Error("similarity outside [0,1] between '" + items_.label(i) + "' and '" +
                    items_.label(j) + "'");
    }
  }
}

std::string utc_now_iso8601() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

HarvestReport harvest(const ItemSet& items, ChatProvider& provider, const ProviderConfig& cfg,
                      const std::filesystem::path& cache_path,
                      const std::string& prompt_template) {
  const std::size_t n = items.size();
  if (n < 2) throw Error("harvest needs at least 2 items");
  if (cfg.max_parallel < 1) throw Error("max_parallel must be at least 1");

  HarvestReport report;
  report.pairs_total = pair_count(n);

  // Pair bookkeeping: prompts and hashes are per rendered prompt, so a
  // template change invalidates the cache for exactly the affected pairs.
  struct Pending {
    std::size_t i, j;
    std::string key_a, key_b;
    std::string prompt;
    std::string prompt_hash;
  };
  std::vector<Pending> pairs;
  pairs.reserve(report.pairs_total);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      auto [lo, hi] = canonical_pair(items.label(i), items.label(j));
      std::string prompt = render_prompt(lo, hi, prompt_template);
      pairs.push_back({i, j, lo, hi, prompt, hash_hex(fnv1a64(prompt))});
    }
  }

  // Replay the cache: last record wins per (pair, model, prompt hash).
  struct CachedValue {
    std::string prompt_hash;
    double similarity;
  };
  std::map<std::pair<std::string, std::string>, CachedValue> cached;
  if (std::filesystem::exists(cache_path)) {
    std::ifstream in(cache_path, std::ios::binary);
    if (!in) throw Error("cannot open cache: " + cache_path.string());
    std::string line;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) {
        ++report.corrupt_cache_lines;
        continue;
      }
      if (!j.contains("similarity")) continue;  // recorded failures are re-queried
      try {
        if (j.at("model").get<std::string>() != cfg.model_name) continue;
        double s = j.at("similarity").get<double>();
        if (!(s >= 0.0 && s <= 1.0)) continue;
        cached[{j.at("item_a").get<std::string>(), j.at("item_b").get<std::string>()}] = {
            j.at("prompt_hash").get<std::string>(), s};
      } catch (const nlohmann::json::exception&) {
        ++report.corrupt_cache_lines;
      }
    }
  }

  std::ofstream cache_out(cache_path, std::ios::binary | std::ios::app);
  if (!cache_out) throw Error("cache path not writable: " + cache_path.string());

  Matrix values(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) values(i, i) = 1.0;

  std::vector<const Pending*> pending;
  for (const auto& p : pairs) {
    auto it = cached.find({p.key_a, p.key_b});
    if (it != cached.end() && it->second.prompt_hash == p.prompt_hash) {
      values(p.i, p.j) = it->second.similarity;
      values(p.j, p.i) = it->second.similarity;
      ++report.cache_hits;
    } else {
      pending.push_back(&p);
    }
  }

  std::mutex sink_mutex;  // guards cache_out, values, report
  std::atomic<std::size_t> next{0};
  report.pairs_requested = pending.size();

  auto worker = [&]() {
    for (;;) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= pending.size()) return;
      const Pending& p = *pending[idx];
      PairQuery query{p.key_a, p.key_b, p.prompt};

      std::string raw;
      std::string failure;
      bool got_response = false;
      for (std::size_t attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        if (attempt > 0) {
          double delay = cfg.retry_backoff_seconds * std::pow(2.0, static_cast<double>(attempt - 1));
          std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        }
        try {
          raw = provider.complete(query);
          got_response = true;
          break;
        } catch (const std::exception& e) {
          failure = e.what();
        }
      }

      std::lock_guard<std::mutex> lock(sink_mutex);
      if (!got_response) {
        report.failed.push_back({p.key_a, p.key_b, failure});
        continue;
      }
      try {
        ParsedSimilarity parsed = parse_similarity(raw);
        SimilarityRecord rec{p.key_a,        p.key_b, cfg.model_name,    p.prompt_hash,
                             raw,            parsed.similarity, utc_now_iso8601(),
                             parsed.warning};
        cache_out << record_to_json(rec).dump() << "\n";
        cache_out.flush();
        values(p.i, p.j) = parsed.similarity;
        values(p.j, p.i) = parsed.similarity;
        ++report.responses_recorded;
        if (!parsed.warning.empty()) ++report.parse_warnings;
      } catch (const Error& e) {
        nlohmann::json j{{"item_a", p.key_a},   {"item_b", p.key_b},
                         {"model", cfg.model_name}, {"prompt_hash", p.prompt_hash},
                         {"raw_response", raw}, {"error", e.what()},
                         {"timestamp", utc_now_iso8601()}};
        cache_out << j.dump() << "\n";
        cache_out.flush();
        report.failed.push_back({p.key_a, p.key_b, e.what()});
      }
    }
  };

  std::size_t thread_count = std::min<std::size_t>(cfg.max_parallel, pending.size());
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(thread_count);
    for (std::size_t t = 0; t < thread_count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  if (report.failed.empty())
    report.matrix = SimilarityMatrix(items, std::move(values), cfg.model_name);
  return report;
}

std::unique_ptr<ChatProvider> mock_provider(std::uint64_t seed) {
  return std::make_unique<MockProvider>(seed);
}

std::unique_ptr<ChatProvider> http_provider(const ProviderConfig& cfg) {
  return std::make_unique<HttpChatProvider>(cfg);
}

DistanceMatrix similarity_to_distance(const SimilarityMatrix& s) {
  const std::size_t n = s.size();
  Matrix d(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = 1.0 - s.at(i, j);
      d(i, j) = v;
      d(j, i) = v;
    }
  return {s.items(), std::move(d), s.model_name()};
}

void save_similarity_csv(const SimilarityMatrix& s, const std::filesystem::path& path) {
  save_labeled_square_csv(s.model_name(), s.items(), s.values(), path);
}

SimilarityMatrix load_similarity_csv(const std::filesystem::path& path) {
  auto raw = load_labeled_square_csv(path);
  const std::size_t n = raw.items.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(raw.values(i, i) - 1.0) > 1e-6)
      throw Error("similarity diagonal must be 1 at '" + raw.items.label(i) + "' in " +
                  path.string());
    raw.values(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double a = raw.values(i, j);
      double b = raw.values(j, i);
      if (std::fabs(a - b) > 1e-6)
        throw Error("asymmetry beyond tolerance between '" + raw.items.label(i) + "' and '" +
                    raw.items.label(j) + "' in " + path.string());
      double avg = (a + b) / 2.0;
      if (avg < 0.0 && avg >= -1e-9) avg = 0.0;
      if (avg > 1.0 && avg <= 1.0 + 1e-9) avg = 1.0;
      raw.values(i, j) = avg;
      raw.values(j, i) = avg;
    }
  }
  std::string model = raw.tag.empty() ? path.stem().string() : raw.tag;
  return {std::move(raw.items), std::move(raw.values), std::move(model)};
}

}  // namespace odormap
