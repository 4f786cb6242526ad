#include "pomp/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "detail.hpp"
#include "pomp/error.hpp"

namespace pomp {

namespace {

// Lenient UTF-8 decoding; malformed bytes become U+FFFD.
std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    int len = 0;
    char32_t cp = 0;
    if (c < 0x80) {
      len = 1;
      cp = c;
    } else if ((c >> 5) == 0x6) {
      len = 2;
      cp = c & 0x1f;
    } else if ((c >> 4) == 0xe) {
      len = 3;
      cp = c & 0x0f;
    } else if ((c >> 3) == 0x1e) {
      len = 4;
      cp = c & 0x07;
    }
    bool ok = len > 0 && i + static_cast<std::size_t>(len) <= s.size();
    for (int k = 1; ok && k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc >> 6) != 0x2) ok = false;
      cp = (cp << 6) | (cc & 0x3f);
    }
    if (!ok) {
      out.push_back(0xfffd);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(len);
  }
  return out;
}

using NgramCounts = std::unordered_map<std::u32string, int>;

NgramCounts count_ngrams(const std::u32string& s, std::size_t n) {
  NgramCounts counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) ++counts[s.substr(i, n)];
  return counts;
}

Score checked(double value, const std::string& metric) {
  if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
    throw Error(ErrorKind::invalid_input, metric + " produced score outside [0, 1]");
  }
  return {value, metric};
}

}  // namespace

std::vector<Score> Scorer::score_batch(std::span<const ScorePair> pairs) {
  std::vector<Score> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(score(p.candidate, p.reference));
  return out;
}

double chrf(std::string_view candidate, std::string_view reference, int max_order, double beta) {
  const auto hyp = decode_utf8(candidate);
  const auto ref = decode_utf8(reference);
  if (hyp.empty() && ref.empty()) return 1.0;
  if (hyp.empty() || ref.empty()) return 0.0;

  double precision = 0.0;
  double recall = 0.0;
  int orders = 0;
  for (std::size_t n = 1; n <= static_cast<std::size_t>(max_order); ++n) {
    if (hyp.size() < n || ref.size() < n) break;
    const auto h = count_ngrams(hyp, n);
    const auto r = count_ngrams(ref, n);
    long matches = 0;
    for (const auto& [gram, count] : h) {
      const auto it = r.find(gram);
      if (it != r.end()) matches += std::min(count, it->second);
    }
    precision += static_cast<double>(matches) / static_cast<double>(hyp.size() - n + 1);
    recall += static_cast<double>(matches) / static_cast<double>(ref.size() - n + 1);
    ++orders;
  }
  precision /= orders;
  recall /= orders;
  if (precision + recall <= 0.0) return 0.0;
  const double b2 = beta * beta;
  return std::clamp((1.0 + b2) * precision * recall / (b2 * precision + recall), 0.0, 1.0);
}

Score LexicalScorer::score(std::string_view candidate, std::string_view reference) {
  return {chrf(candidate, reference, max_order_, beta_), name()};
}

MockScorer::MockScorer(Fn fallback) : fallback_(std::move(fallback)) {
  if (!fallback_) fallback_ = &MockScorer::hash_score;
}

void MockScorer::set(std::string candidate, double value) { rules_[std::move(candidate)] = value; }

Score MockScorer::score(std::string_view candidate, std::string_view reference) {
  const auto it = rules_.find(candidate);
  const double v = it != rules_.end() ? it->second : fallback_(candidate, reference);
  return checked(v, name());
}

double MockScorer::hash_score(std::string_view candidate, std::string_view reference) {
  if (candidate == reference) return 1.0;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : candidate) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  h ^= 0xff;
  h *= 0x100000001b3ULL;
  for (unsigned char c : reference) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return static_cast<double>(splitmix64(h) >> 11) * 0x1.0p-53;
}

RemoteScorer::RemoteScorer(RemoteScorerConfig config, Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper)) {
  if (config_.url.empty()) throw Error(ErrorKind::invalid_config, "remote scorer needs a URL");
  if (config_.batch_size < 1) throw Error(ErrorKind::invalid_config, "remote scorer batch size must be >= 1");
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

Score RemoteScorer::score(std::string_view candidate, std::string_view reference) {
  const ScorePair pair{std::string(candidate), std::string(reference)};
  return score_batch(std::span<const ScorePair>(&pair, 1)).front();
}

std::vector<double> RemoteScorer::post_batch(std::span<const ScorePair> pairs) {
  nlohmann::json body{{"pairs", nlohmann::json::array()}};
  for (const auto& p : pairs) body["pairs"].push_back({{"candidate", p.candidate}, {"reference", p.reference}});
  double delay = static_cast<double>(config_.retry.initial_backoff.count());
  for (int attempt = 1;; ++attempt) {
    try {
      const auto res = detail::http_post_json(config_.url, body.dump(), {}, config_.timeout);
      if (res.status == 429) throw Error(ErrorKind::rate_limited, "scorer rate-limited");
      if (res.status >= 500) throw Error(ErrorKind::transport, "scorer returned HTTP " + std::to_string(res.status));
      if (res.status != 200) {
        throw Error(ErrorKind::malformed_response, "scorer returned HTTP " + std::to_string(res.status));
      }
      std::vector<double> scores;
      try {
        scores = nlohmann::json::parse(res.body).at("scores").get<std::vector<double>>();
      } catch (const std::exception& e) {
        throw Error(ErrorKind::malformed_response, std::string("scorer payload: ") + e.what());
      }
      if (scores.size() != pairs.size()) {
        throw Error(ErrorKind::malformed_response, "scorer returned " + std::to_string(scores.size()) +
                                                       " scores for " + std::to_string(pairs.size()) + " pairs");
      }
      return scores;
    } catch (const Error& e) {
      if (!e.retriable() || attempt >= config_.retry.max_attempts) throw;
      sleeper_(std::chrono::milliseconds(static_cast<std::int64_t>(delay)));
      delay = std::min(delay * config_.retry.multiplier, static_cast<double>(config_.retry.max_backoff.count()));
    }
  }
}

std::vector<Score> RemoteScorer::score_batch(std::span<const ScorePair> pairs) {
  std::vector<Score> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); i += config_.batch_size) {
    const auto chunk = pairs.subspan(i, std::min(config_.batch_size, pairs.size() - i));
    for (double v : post_batch(chunk)) {
      if (!std::isfinite(v)) throw Error(ErrorKind::malformed_response, "scorer returned a non-finite score");
      out.push_back({std::clamp(v, 0.0, 1.0), name()});
    }
  }
  return out;
}

bool Selection::initial_chosen() const { return label == kInitialLabel; }

Selection select_best(std::span<const std::pair<std::string, std::string>> candidates, std::string_view initial,
                      std::string_view reference, Scorer& scorer) {
  Selection sel;
  sel.text = std::string(initial);
  sel.label = kInitialLabel;
  try {
    sel.initial_score = scorer.score(initial, reference).value;
    sel.score = sel.initial_score;
  } catch (const Error& e) {
    sel.warnings.push_back(std::string("scoring the initial translation failed: ") + e.what());
  }
  for (const auto& [label, text] : candidates) {
    CandidateScore cs{label, std::nullopt, {}};
    try {
      cs.score = scorer.score(text, reference).value;
    } catch (const Error& e) {
      cs.error = e.what();
      sel.warnings.push_back("candidate '" + label + "' excluded: " + e.what());
    }
    // Strict improvement only, so the initial translation and earlier
    // candidates win ties.
    if (cs.score && (!sel.score || *cs.score > *sel.score)) {
      sel.score = cs.score;
      sel.text = text;
      sel.label = label;
    }
    sel.candidates.push_back(std::move(cs));
  }
  if (!sel.score) sel.warnings.push_back("every score failed; keeping the initial translation");
  return sel;
}

}  // namespace pomp
