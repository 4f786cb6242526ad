#include "pomp/llm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "detail.hpp"

namespace pomp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto nl = s.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(s.substr(start));
      break;
    }
    lines.push_back(s.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

void validate(const CompletionRequest& request) {
  if (request.prompt.empty()) throw Error(ErrorKind::invalid_input, "completion request has an empty prompt");
  if (request.max_output_tokens < 1) throw Error(ErrorKind::invalid_input, "max_output_tokens must be positive");
  if (!(request.temperature >= 0.0)) throw Error(ErrorKind::invalid_input, "temperature must be >= 0");
}

std::string prompt_digest(std::string_view prompt) { return detail::sha256_hex(prompt); }

std::string clean_completion(std::string_view raw) {
  std::string_view text = trim(raw);
  if (!text.empty() && text.front() == '<') {
    const auto close = text.find(">:");
    const auto nl = text.find('\n');
    if (close != std::string_view::npos && (nl == std::string_view::npos || close < nl)) {
      text = trim(text.substr(close + 2));
    }
  }
  std::string out;
  for (const auto line : split_lines(text)) {
    if (trim(line).empty()) break;
    if (!out.empty()) out += '\n';
    out += line;
  }
  return std::string(trim(out));
}

void ScriptedProvider::add_rule(std::string digest, std::string text) {
  std::lock_guard lock(mu_);
  rules_[std::move(digest)] = std::move(text);
}

CompletionResult ScriptedProvider::complete(const CompletionRequest& request) {
  validate(request);
  const auto start = Clock::now();
  CompletionResult result;
  result.provider = name();
  {
    std::lock_guard lock(mu_);
    const auto it = rules_.find(prompt_digest(request.prompt));
    if (it != rules_.end()) {
      result.text = it->second;
      result.latency_ms = elapsed_ms(start);
      return result;
    }
  }
  if (!fallback_) {
    throw Error(ErrorKind::cache_miss, "no scripted completion for request '" + request.request_tag + "'");
  }
  result.text = fallback_(request);
  result.latency_ms = elapsed_ms(start);
  return result;
}

std::string echo_query_translation(const CompletionRequest& request) {
  const auto lines = split_lines(request.prompt);
  if (lines.size() < 2) return {};
  const auto prev = lines[lines.size() - 2];
  const auto colon = prev.find(">: ");
  if (colon == std::string_view::npos) return {};
  return std::string(prev.substr(colon + 3));
}

std::string noisy_echo(const CompletionRequest& request) {
  const std::string base = echo_query_translation(request);
  // Labels of the query block (after the last blank line) pick the noise pattern.
  const auto block_start = request.prompt.rfind("\n\n");
  const std::string_view query =
      block_start == std::string::npos ? std::string_view(request.prompt)
                                       : std::string_view(request.prompt).substr(block_start + 2);
  std::string labels;
  for (const auto line : split_lines(query)) {
    const auto close = line.find(">:");
    if (close != std::string_view::npos) labels += std::string(line.substr(0, close + 2));
  }
  std::istringstream words(base);
  std::string word;
  std::string out;
  while (words >> word) {
    if (fnv1a(labels + "|" + word) % 5 == 0) continue;
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out.empty() ? base : out;
}

ReplayLog::ReplayLog(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) {
    const nlohmann::json header{{"format", "pomp-replay"}, {"version", kVersion}};
    detail::append_line(path_, header.dump());
    return;
  }
  const std::string text = detail::read_file(path_);
  std::size_t line_no = 0;
  for (const auto line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw Error(ErrorKind::load, path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (line_no == 1) {
      if (j.value("format", "") != "pomp-replay") {
        throw Error(ErrorKind::load, path_.string() + ": not a replay log");
      }
      if (j.value("version", -1) != kVersion) {
        throw Error(ErrorKind::schema_version, path_.string() + ": unsupported replay log version");
      }
      continue;
    }
    try {
      entries_[{j.at("tag").get<std::string>(), j.at("digest").get<std::string>()}] =
          j.at("text").get<std::string>();
    } catch (const std::exception& e) {
      throw Error(ErrorKind::load, path_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::optional<std::string> ReplayLog::find(const std::string& tag, const std::string& digest) const {
  std::lock_guard lock(mu_);
  const auto it = entries_.find({tag, digest});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ReplayLog::append(const std::string& tag, const std::string& digest, const std::string& text,
                       const std::string& provider) {
  std::lock_guard lock(mu_);
  const nlohmann::json j{{"tag", tag}, {"digest", digest}, {"text", text}, {"provider", provider}};
  detail::append_line(path_, j.dump());
  entries_[{tag, digest}] = text;
}

std::size_t ReplayLog::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

CompletionResult RecordingProvider::complete(const CompletionRequest& request) {
  auto result = inner_->complete(request);
  log_->append(request.request_tag, prompt_digest(request.prompt), result.text, result.provider);
  return result;
}

CompletionResult ReplayProvider::complete(const CompletionRequest& request) {
  validate(request);
  const auto start = Clock::now();
  const auto hit = log_->find(request.request_tag, prompt_digest(request.prompt));
  if (!hit) throw Error(ErrorKind::cache_miss, "no recorded completion for '" + request.request_tag + "'");
  CompletionResult result;
  result.text = *hit;
  result.provider = name();
  result.cached = true;
  result.latency_ms = elapsed_ms(start);
  return result;
}

RetryingProvider::RetryingProvider(std::shared_ptr<CompletionProvider> inner, RetryPolicy policy,
                                   Sleeper sleeper, std::uint64_t jitter_seed)
    : inner_(std::move(inner)), policy_(policy), sleeper_(std::move(sleeper)), jitter_rng_(jitter_seed) {
  if (policy_.max_attempts < 1) throw Error(ErrorKind::invalid_config, "retry policy needs at least one attempt");
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

CompletionResult RetryingProvider::complete(const CompletionRequest& request) {
  double delay = static_cast<double>(policy_.initial_backoff.count());
  for (int attempt = 1;; ++attempt) {
    try {
      auto result = inner_->complete(request);
      std::lock_guard lock(mu_);
      attempts_.push_back({request.request_tag, attempt, std::nullopt, {}});
      return result;
    } catch (const Error& e) {
      const bool retry = e.retriable() && attempt < policy_.max_attempts;
      std::chrono::milliseconds backoff{0};
      if (retry) {
        double jittered = delay;
        {
          std::lock_guard lock(mu_);
          jittered *= 1.0 + policy_.jitter * (2.0 * uniform01(jitter_rng_) - 1.0);
        }
        jittered = std::min(jittered, static_cast<double>(policy_.max_backoff.count()));
        backoff = std::chrono::milliseconds(static_cast<std::int64_t>(std::llround(std::max(0.0, jittered))));
      }
      {
        std::lock_guard lock(mu_);
        attempts_.push_back({request.request_tag, attempt, e.kind(), backoff});
      }
      if (!retry) throw;
      sleeper_(backoff);
      delay = std::min(delay * policy_.multiplier, static_cast<double>(policy_.max_backoff.count()));
    }
  }
}

std::vector<AttemptRecord> RetryingProvider::attempts() const {
  std::lock_guard lock(mu_);
  return attempts_;
}

ThrottledProvider::ThrottledProvider(std::shared_ptr<CompletionProvider> inner, int max_in_flight)
    : inner_(std::move(inner)), max_in_flight_(max_in_flight) {
  if (max_in_flight < 1) throw Error(ErrorKind::invalid_config, "max_in_flight must be >= 1");
}

CompletionResult ThrottledProvider::complete(const CompletionRequest& request) {
  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < max_in_flight_; });
    ++in_flight_;
  }
  struct Release {
    ThrottledProvider* self;
    ~Release() {
      {
        std::lock_guard lock(self->mu_);
        --self->in_flight_;
      }
      self->cv_.notify_one();
    }
  } release{this};
  return inner_->complete(request);
}

CompletionResult FaultInjectionProvider::complete(const CompletionRequest& request) {
  ++calls_;
  const int now = ++in_flight_;
  int prev = max_concurrency_.load();
  while (now > prev && !max_concurrency_.compare_exchange_weak(prev, now)) {
  }
  struct Leave {
    std::atomic<int>& n;
    ~Leave() { --n; }
  } leave{in_flight_};

  if (plan_.delay.count() > 0) std::this_thread::sleep_for(plan_.delay);
  if (plan_.permanent_failure && plan_.permanent_failure(request)) {
    throw Error(ErrorKind::malformed_response, "injected permanent failure for '" + request.request_tag + "'");
  }
  int seen = 0;
  {
    std::lock_guard lock(mu_);
    seen = seen_[request.request_tag]++;
  }
  if (seen < plan_.transient_failures_per_tag) {
    throw Error(plan_.transient_kind, "injected transient failure " + std::to_string(seen + 1) + " for '" +
                                          request.request_tag + "'");
  }
  return inner_->complete(request);
}

HttpProviderConfig http_config_from_env(HttpProviderConfig config) {
  if (const char* url = std::getenv(kBaseUrlEnv); url && *url) config.base_url = url;
  if (const char* key = std::getenv(kApiKeyEnv); key && *key) config.api_key = key;
  return config;
}

CompletionResult HttpChatProvider::complete(const CompletionRequest& request) {
  validate(request);
  const auto start = Clock::now();
  nlohmann::json body{
      {"model", request.model_name.empty() ? config_.model : request.model_name},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"max_tokens", request.max_output_tokens},
  };
  std::map<std::string, std::string> headers;
  if (!config_.api_key.empty()) headers["Authorization"] = "Bearer " + config_.api_key;
  std::string url = config_.base_url;
  if (!url.empty() && url.back() == '/') url.pop_back();
  url += "/chat/completions";

  const auto res = detail::http_post_json(url, body.dump(), headers, config_.timeout);
  const std::string status = "HTTP " + std::to_string(res.status);
  if (res.status == 429) throw Error(ErrorKind::rate_limited, status + " from " + url);
  if (res.status == 408 || res.status == 504) throw Error(ErrorKind::timeout, status + " from " + url);
  if (res.status >= 500) throw Error(ErrorKind::transport, status + " from " + url);
  if (res.status != 200) throw Error(ErrorKind::malformed_response, status + " from " + url + ": " + res.body);

  std::string raw;
  try {
    const auto j = nlohmann::json::parse(res.body);
    raw = j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const std::exception& e) {
    throw Error(ErrorKind::malformed_response, std::string("unexpected completion payload: ") + e.what());
  }
  CompletionResult result;
  result.text = clean_completion(raw);
  if (result.text.empty()) throw Error(ErrorKind::empty_output, "empty completion for '" + request.request_tag + "'");
  result.provider = name();
  result.latency_ms = elapsed_ms(start);
  return result;
}

}  // namespace pomp
