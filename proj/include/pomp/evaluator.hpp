#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pomp/llm.hpp"

namespace pomp {

struct Score {
  double value = 0.0;  // in [0, 1]
  std::string metric_name;
};

struct ScorePair {
  std::string candidate;
  std::string reference;
};

// Scorer contract: reference-based quality in [0, 1].
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual Score score(std::string_view candidate, std::string_view reference) = 0;
  virtual std::vector<Score> score_batch(std::span<const ScorePair> pairs);
  virtual std::string name() const = 0;
};

// Character n-gram F-score over Unicode code points, whitespace kept.
// Precision and recall are averaged uniformly over the orders 1..max_order
// that both strings are long enough to have; F uses recall weight beta.
// Both empty scores 1, exactly one empty scores 0.
double chrf(std::string_view candidate, std::string_view reference, int max_order = 6, double beta = 2.0);

class LexicalScorer final : public Scorer {
 public:
  explicit LexicalScorer(int max_order = 6, double beta = 2.0) : max_order_(max_order), beta_(beta) {}
  Score score(std::string_view candidate, std::string_view reference) override;
  std::string name() const override { return "chrF"; }

 private:
  int max_order_;
  double beta_;
};

// Deterministic scripted scorer: exact candidate-text rules, then the
// fallback function (default: a hash of the pair, 1.0 for identical text).
class MockScorer final : public Scorer {
 public:
  using Fn = std::function<double(std::string_view candidate, std::string_view reference)>;

  explicit MockScorer(Fn fallback = {});
  void set(std::string candidate, double value);
  Score score(std::string_view candidate, std::string_view reference) override;
  std::string name() const override { return "mock"; }

  static double hash_score(std::string_view candidate, std::string_view reference);

 private:
  std::map<std::string, double, std::less<>> rules_;
  Fn fallback_;
};

// POST {"pairs":[{"candidate","reference"},...]} -> {"scores":[...]}.
struct RemoteScorerConfig {
  std::string url;
  std::size_t batch_size = 32;
  std::chrono::milliseconds timeout{30000};
  RetryPolicy retry;
  std::string metric_name = "remote";
};

class RemoteScorer final : public Scorer {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit RemoteScorer(RemoteScorerConfig config, Sleeper sleeper = {});
  Score score(std::string_view candidate, std::string_view reference) override;
  std::vector<Score> score_batch(std::span<const ScorePair> pairs) override;
  std::string name() const override { return config_.metric_name; }

 private:
  std::vector<double> post_batch(std::span<const ScorePair> pairs);

  RemoteScorerConfig config_;
  Sleeper sleeper_;
};

struct CandidateScore {
  std::string label;
  std::optional<double> score;  // empty when the scorer failed
  std::string error;
};

struct Selection {
  std::string text;
  std::string label;  // kInitialLabel or the winning candidate's label
  std::optional<double> score;
  std::optional<double> initial_score;
  std::vector<CandidateScore> candidates;  // input order
  std::vector<std::string> warnings;

  bool initial_chosen() const;
};

inline constexpr const char* kInitialLabel = "initial";

// Argmax over candidates and the initial translation. Ties prefer the
// initial translation, then the earliest candidate.
Selection select_best(std::span<const std::pair<std::string, std::string>> candidates, std::string_view initial,
                      std::string_view reference, Scorer& scorer);

}  // namespace pomp
