#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pomp/error.hpp"
#include "pomp/random.hpp"

namespace pomp {

struct CompletionRequest {
  std::string prompt;
  int max_output_tokens = 256;
  double temperature = 0.0;
  std::string model_name;
  std::string request_tag;  // "<record id>/<operation>/<vertex or path>"
};

struct CompletionResult {
  std::string text;
  double latency_ms = 0.0;
  std::string provider;
  bool cached = false;
};

void validate(const CompletionRequest& request);

// Hex SHA-256 of the prompt text.
std::string prompt_digest(std::string_view prompt);

// Completion-provider contract. Implementations must be safe to call from
// several threads at once.
class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  virtual CompletionResult complete(const CompletionRequest& request) = 0;
  virtual std::string name() const = 0;
};

// Post-processing applied to live model output: drops a leading echoed
// "<...>:" label and everything from the first blank line on, then trims.
std::string clean_completion(std::string_view raw);

// Deterministic mock: exact prompt-digest rules first, then the fallback.
class ScriptedProvider final : public CompletionProvider {
 public:
  using Responder = std::function<std::string(const CompletionRequest&)>;

  explicit ScriptedProvider(Responder fallback = {}) : fallback_(std::move(fallback)) {}

  void add_rule(std::string digest, std::string text);
  CompletionResult complete(const CompletionRequest& request) override;
  std::string name() const override { return "scripted"; }

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::string> rules_;
  Responder fallback_;
};

// Text of the query's last filled line, i.e. the translation the prompt
// asks the model to refine.
std::string echo_query_translation(const CompletionRequest& request);

// Deterministic stand-in translator: echoes the query translation but drops
// words according to a hash of the word and the auxiliary labels present in
// the query, so different prompts yield different outputs.
std::string noisy_echo(const CompletionRequest& request);

// Append-only replay log keyed by (request_tag, prompt digest).
//
// Format: JSON lines. The first line is {"format":"pomp-replay","version":1};
// every further line is {"tag","digest","text","provider"}.
class ReplayLog {
 public:
  static constexpr int kVersion = 1;

  // Loads existing entries; creates the file (with header) when absent.
  explicit ReplayLog(std::filesystem::path path);

  std::optional<std::string> find(const std::string& tag, const std::string& digest) const;
  void append(const std::string& tag, const std::string& digest, const std::string& text,
              const std::string& provider);
  std::size_t size() const;

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::map<std::pair<std::string, std::string>, std::string> entries_;
};

class RecordingProvider final : public CompletionProvider {
 public:
  RecordingProvider(std::shared_ptr<CompletionProvider> inner, std::shared_ptr<ReplayLog> log)
      : inner_(std::move(inner)), log_(std::move(log)) {}
  CompletionResult complete(const CompletionRequest& request) override;
  std::string name() const override { return inner_->name(); }

 private:
  std::shared_ptr<CompletionProvider> inner_;
  std::shared_ptr<ReplayLog> log_;
};

// Serves recorded completions; a miss raises cache_miss.
class ReplayProvider final : public CompletionProvider {
 public:
  explicit ReplayProvider(std::shared_ptr<ReplayLog> log) : log_(std::move(log)) {}
  CompletionResult complete(const CompletionRequest& request) override;
  std::string name() const override { return "replay"; }

 private:
  std::shared_ptr<ReplayLog> log_;
};

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{200};
  std::chrono::milliseconds max_backoff{10000};
  double multiplier = 2.0;
  double jitter = 0.2;  // +/- fraction of each delay
};

struct AttemptRecord {
  std::string request_tag;
  int attempt = 0;  // 1-based
  std::optional<ErrorKind> failure;
  std::chrono::milliseconds backoff{0};
};

// Retries retriable failures with exponential backoff and jitter.
class RetryingProvider final : public CompletionProvider {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  RetryingProvider(std::shared_ptr<CompletionProvider> inner, RetryPolicy policy, Sleeper sleeper = {},
                   std::uint64_t jitter_seed = 0);

  CompletionResult complete(const CompletionRequest& request) override;
  std::string name() const override { return inner_->name(); }

  std::vector<AttemptRecord> attempts() const;

 private:
  std::shared_ptr<CompletionProvider> inner_;
  RetryPolicy policy_;
  Sleeper sleeper_;
  mutable std::mutex mu_;
  Rng jitter_rng_;
  std::vector<AttemptRecord> attempts_;
};

// Caps the number of outstanding calls into `inner`.
class ThrottledProvider final : public CompletionProvider {
 public:
  ThrottledProvider(std::shared_ptr<CompletionProvider> inner, int max_in_flight);
  CompletionResult complete(const CompletionRequest& request) override;
  std::string name() const override { return inner_->name(); }

 private:
  std::shared_ptr<CompletionProvider> inner_;
  int max_in_flight_;
  std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
};

// Test harness: fails the first N attempts of every request tag with a
// transient error, optionally fails selected requests permanently, and
// tracks observed concurrency.
struct FaultPlan {
  int transient_failures_per_tag = 0;
  ErrorKind transient_kind = ErrorKind::transport;
  std::function<bool(const CompletionRequest&)> permanent_failure;
  std::chrono::milliseconds delay{0};
};

class FaultInjectionProvider final : public CompletionProvider {
 public:
  FaultInjectionProvider(std::shared_ptr<CompletionProvider> inner, FaultPlan plan)
      : inner_(std::move(inner)), plan_(std::move(plan)) {}
  CompletionResult complete(const CompletionRequest& request) override;
  std::string name() const override { return "fault-injection"; }

  int calls() const { return calls_.load(); }
  int max_concurrency() const { return max_concurrency_.load(); }

 private:
  std::shared_ptr<CompletionProvider> inner_;
  FaultPlan plan_;
  std::mutex mu_;
  std::map<std::string, int> seen_;
  std::atomic<int> calls_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_concurrency_{0};
};

// Chat-completion HTTP endpoint: POST {base_url}/chat/completions with a
// single user message. One attempt per call; wrap in RetryingProvider.
struct HttpProviderConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-3.5-turbo";
  std::string api_key;  // sent as a bearer token when non-empty
  std::chrono::milliseconds timeout{60000};
};

inline constexpr const char* kApiKeyEnv = "POMP_API_KEY";
inline constexpr const char* kBaseUrlEnv = "POMP_BASE_URL";

// Fills base_url and api_key from the environment when set.
HttpProviderConfig http_config_from_env(HttpProviderConfig config = {});

class HttpChatProvider final : public CompletionProvider {
 public:
  explicit HttpChatProvider(HttpProviderConfig config) : config_(std::move(config)) {}
  CompletionResult complete(const CompletionRequest& request) override;
  std::string name() const override { return "http:" + config_.model; }

 private:
  HttpProviderConfig config_;
};

}  // namespace pomp
