#include "pomp/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <ostream>
#include <sstream>

#include "detail.hpp"
#include "pomp/corpus.hpp"
#include "pomp/embedding.hpp"
#include "pomp/error.hpp"
#include "pomp/evaluator.hpp"
#include "pomp/graph.hpp"
#include "pomp/llm.hpp"
#include "pomp/oracle.hpp"
#include "pomp/report.hpp"
#include "pomp/runner.hpp"

namespace pomp::cli {

namespace {

struct Options {
  std::uint64_t seed = 0;
  std::string checkpoint;
  std::string dataset;
  std::string pool;
  std::string out;
  std::string trace;

  std::string provider = "mock";
  std::string scorer = "lexical";
  std::optional<std::uint64_t> horizon;
  std::size_t paths = 3;
  std::string path_length = "2";
  std::size_t k_shot = 4;
  std::string attribution = "as_printed";
  double lr = 0.5;
  std::string schedule = "inverse";
  std::optional<double> tau;
  double p_min = kDefaultProbabilityFloor;

  std::string model = "gpt-3.5-turbo";
  std::string base_url;
  int max_tokens = 256;
  double temperature = 0.0;
  int max_in_flight = 4;
  int max_attempts = 4;
  int timeout_ms = 60000;
  std::string replay_log;
  std::string record_log;
  std::string mock_script;
  std::string scorer_url;
  std::size_t scorer_batch = 32;
  std::string clock = "auto";
  std::uint64_t checkpoint_every = 0;
  std::uint64_t resume_offset = 0;
  std::string inference = "best_sampled";
  std::string preamble;
  bool sequential = false;

  // init-graph
  std::string embedder = "hashing";
  double similarity = 0.5;
  std::string embedder_url;

  // baseline
  std::string kind = "refine";

  // simulate
  std::string oracle;
  std::size_t runs = 1;
  std::string source = "src";
  std::string target = "tgt";
  double initial_probability = 0.5;

  // report
  std::string plot_dir;
};

std::string fixed(double v, int digits = 5) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void print_graph(std::ostream& out, const MetaGraph& g) {
  out << g.source.code << " -> " << g.target.code << "  (revision " << g.revision << ")\n";
  out << "code  language        probability  updates\n";
  for (const auto& a : g.auxiliaries) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-5s %-15s %-12s %llu\n", a.language.code.c_str(),
                  a.language.display_name.c_str(), fixed(a.probability).c_str(),
                  static_cast<unsigned long long>(a.update_count));
    out << line;
  }
}

Timestamp fixed_epoch() {
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH"); e && *e) return std::strtoll(e, nullptr, 10);
  return 0;
}

std::function<Timestamp()> make_clock(const std::string& mode, bool live) {
  if (mode == "wall" || (mode == "auto" && live)) return wall_clock_now;
  if (mode == "fixed" || mode == "auto") return fixed_epoch;
  throw Error(ErrorKind::invalid_config, "unknown clock '" + mode + "'");
}

PathLength parse_path_length(const std::string& text) {
  const std::string prefix = "sampled:";
  if (text.rfind(prefix, 0) == 0) {
    SampledLength s;
    std::stringstream ss(text.substr(prefix.size()));
    std::string item;
    while (std::getline(ss, item, ',')) s.weights.push_back(detail::parse_decimal(item));
    return s;
  }
  try {
    std::size_t pos = 0;
    const long m = std::stol(text, &pos);
    if (pos != text.size() || m < 1) throw std::invalid_argument("bad");
    return FixedLength{static_cast<std::size_t>(m)};
  } catch (const std::exception&) {
    throw Error(ErrorKind::invalid_config, "path length must be a positive integer or sampled:w1,w2,...");
  }
}

AttributionMode parse_attribution(const std::string& s) {
  if (s == "as_printed") return AttributionMode::as_printed;
  if (s == "exact" || s == "exact_system") return AttributionMode::exact_system;
  throw Error(ErrorKind::invalid_config, "unknown attribution mode '" + s + "'");
}

RunConfig make_run_config(const Options& o, std::uint64_t horizon) {
  RunConfig c;
  c.sampler.paths_per_instance = o.paths;
  c.sampler.path_length = parse_path_length(o.path_length);
  c.sampler.rng_seed = o.seed;
  c.evolution = default_evolution_config(horizon);
  c.evolution.learning_rate_initial = o.lr;
  if (o.schedule == "inverse") {
    c.evolution.schedule = LearningRateSchedule::inverse_decay;
  } else if (o.schedule == "linear") {
    c.evolution.schedule = LearningRateSchedule::linear_to_zero;
  } else {
    throw Error(ErrorKind::invalid_config, "unknown schedule '" + o.schedule + "'");
  }
  if (o.tau) c.evolution.decay_tau = *o.tau;
  c.evolution.attribution = parse_attribution(o.attribution);
  c.evolution.p_min = o.p_min;
  c.k_shot = o.k_shot;
  c.horizon = horizon;
  c.root_seed = o.seed;
  c.checkpoint_every = o.checkpoint_every;
  c.model_name = o.model;
  c.max_output_tokens = o.max_tokens;
  c.temperature = o.temperature;
  c.prompt.preamble = o.preamble;
  c.parallel_calls = !o.sequential;
  if (o.inference == "best_sampled") {
    c.inference = InferencePath::best_sampled;
  } else if (o.inference == "greedy") {
    c.inference = InferencePath::greedy;
  } else {
    throw Error(ErrorKind::invalid_config, "unknown inference mode '" + o.inference + "'");
  }
  return c;
}

std::shared_ptr<CompletionProvider> make_provider(const Options& o) {
  std::shared_ptr<CompletionProvider> p;
  if (o.provider == "mock") {
    auto scripted = std::make_shared<ScriptedProvider>(noisy_echo);
    if (!o.mock_script.empty()) {
      const auto text = detail::read_file(o.mock_script);
      std::istringstream lines(text);
      std::string line;
      while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
          const auto j = nlohmann::json::parse(line);
          scripted->add_rule(j.at("digest").get<std::string>(), j.at("text").get<std::string>());
        } catch (const std::exception& e) {
          throw Error(ErrorKind::invalid_config, o.mock_script + ": bad rule: " + e.what());
        }
      }
    }
    p = scripted;
  } else if (o.provider == "replay") {
    if (o.replay_log.empty()) throw Error(ErrorKind::invalid_config, "--provider replay requires --replay-log");
    if (!std::filesystem::exists(o.replay_log)) {
      throw Error(ErrorKind::invalid_config, "replay log " + o.replay_log + " does not exist");
    }
    p = std::make_shared<ReplayProvider>(std::make_shared<ReplayLog>(o.replay_log));
  } else if (o.provider == "http") {
    HttpProviderConfig hc;
    hc.model = o.model;
    hc.timeout = std::chrono::milliseconds(o.timeout_ms);
    hc = http_config_from_env(hc);
    if (!o.base_url.empty()) hc.base_url = o.base_url;
    RetryPolicy policy;
    policy.max_attempts = o.max_attempts;
    auto retrying = std::make_shared<RetryingProvider>(std::make_shared<HttpChatProvider>(hc), policy,
                                                       RetryingProvider::Sleeper{}, derive_seed(o.seed, "retry"));
    p = std::make_shared<ThrottledProvider>(retrying, o.max_in_flight);
  } else {
    throw Error(ErrorKind::invalid_config, "unknown provider '" + o.provider + "'");
  }
  if (!o.record_log.empty()) p = std::make_shared<RecordingProvider>(p, std::make_shared<ReplayLog>(o.record_log));
  return p;
}

std::unique_ptr<Scorer> make_scorer(const Options& o) {
  if (o.scorer == "lexical") return std::make_unique<LexicalScorer>();
  if (o.scorer == "mock") return std::make_unique<MockScorer>();
  if (o.scorer == "remote") {
    RemoteScorerConfig rc;
    rc.url = o.scorer_url;
    rc.batch_size = o.scorer_batch;
    rc.timeout = std::chrono::milliseconds(o.timeout_ms);
    rc.retry.max_attempts = o.max_attempts;
    return std::make_unique<RemoteScorer>(rc);
  }
  throw Error(ErrorKind::invalid_config, "unknown scorer '" + o.scorer + "'");
}

std::unique_ptr<EmbeddingProvider> make_embedder(const Options& o) {
  if (o.embedder == "identical") return std::make_unique<IdenticalEmbedder>();
  if (o.embedder == "fixed") return std::make_unique<FixedSimilarityEmbedder>(o.similarity);
  if (o.embedder == "hashing") return std::make_unique<HashingEmbedder>();
  if (o.embedder == "http") {
    if (o.embedder_url.empty()) throw Error(ErrorKind::invalid_config, "--embedder http requires --embedder-url");
    return std::make_unique<HttpEmbedder>(HttpEmbedderConfig{o.embedder_url, std::chrono::milliseconds(o.timeout_ms)});
  }
  throw Error(ErrorKind::invalid_config, "unknown embedder '" + o.embedder + "'");
}

int cmd_init_graph(const Options& o, std::ostream& out) {
  const Dataset ds = load_dataset(o.dataset);
  if (ds.aux_langs.empty()) throw Error(ErrorKind::load, o.dataset + ": dataset declares no auxiliary languages");
  if (ds.records.empty()) throw Error(ErrorKind::load, o.dataset + ": dataset has no records");
  auto embedder = make_embedder(o);
  std::vector<std::pair<LanguageId, double>> init;
  for (const auto& lang : ds.aux_langs) {
    SentencePairBatch batch;
    for (const auto& r : ds.records) batch.push_back({r.source_sentence, r.aux_translations.at(lang.code)});
    init.emplace_back(lang, compute_initial_probability(batch, *embedder));
  }
  const auto clock = make_clock(o.clock, o.embedder == "http");
  const MetaGraph g = build_meta_graph(ds.source, ds.target, init, clock());
  save_checkpoint(g, o.out);
  print_graph(out, g);
  return kOk;
}

struct ProviderStack {
  std::shared_ptr<CompletionProvider> llm;
  std::unique_ptr<Scorer> scorer;
  Providers providers() { return {*llm, *scorer}; }
};

Dataset load_pool(const Options& o, const Dataset& fallback) {
  return o.pool.empty() ? fallback : load_dataset(o.pool);
}

int cmd_train(const Options& o, std::ostream& out) {
  MetaGraph graph = load_checkpoint(o.checkpoint, 0.0);
  const Dataset stream = load_dataset(o.dataset);
  const Dataset pool = load_pool(o, stream);
  const std::uint64_t horizon = o.horizon.value_or(stream.records.size());
  const RunConfig config = make_run_config(o, horizon);
  if (o.resume_offset > horizon) throw Error(ErrorKind::invalid_config, "resume offset is past the horizon");
  ProviderStack stack{make_provider(o), make_scorer(o)};
  TrainOptions topts;
  topts.checkpoint_path = o.out;
  if (!o.trace.empty()) topts.trace_path = o.trace;
  topts.start_offset = o.resume_offset;
  topts.clock = make_clock(o.clock, o.provider == "http");
  std::size_t warnings = 0;
  topts.on_instance = [&](const InstanceTrace& t) { warnings += t.warnings.size(); };
  const auto result = train(stream, pool, std::move(graph), config, stack.providers(), topts);
  out << "trained instances " << o.resume_offset << ".." << horizon << " (" << result.traces.size() << " run, "
      << warnings << " warnings)\n";
  print_graph(out, result.graph);
  return kOk;
}

int cmd_infer(const Options& o, std::ostream& out) {
  const MetaGraph graph = load_checkpoint(o.checkpoint, 0.0);
  const Dataset test = load_dataset(o.dataset);
  const Dataset pool = load_pool(o, test);
  const RunConfig config = make_run_config(o, std::max<std::uint64_t>(1, test.records.size()));
  ProviderStack stack{make_provider(o), make_scorer(o)};
  std::string lines;
  for (std::size_t i = 0; i < test.records.size(); ++i) {
    const auto res = infer(test.records[i], i, graph, pool, config, stack.providers());
    out << test.records[i].id << " [" << path_signature(res.path) << "]" << (res.fallback ? " (fallback)" : "")
        << ": " << res.text << "\n";
    nlohmann::ordered_json j{{"id", test.records[i].id},
                             {"path", path_signature(res.path)},
                             {"output", res.text},
                             {"refined", res.refined_text},
                             {"fallback", res.fallback}};
    lines += j.dump() + "\n";
  }
  if (!o.out.empty()) detail::write_file_atomic(o.out, lines);
  return kOk;
}

int cmd_baseline(const Options& o, std::ostream& out) {
  BaselineKind kind;
  if (o.kind == "trans") {
    kind = BaselineKind::trans;
  } else if (o.kind == "refine") {
    kind = BaselineKind::refine;
  } else {
    throw Error(ErrorKind::invalid_config, "unknown baseline kind '" + o.kind + "'");
  }
  const Dataset test = load_dataset(o.dataset);
  const Dataset pool = load_pool(o, test);
  const RunConfig config = make_run_config(o, 1);
  ProviderStack stack{make_provider(o), make_scorer(o)};
  const auto report = run_baseline(kind, test, pool, config, stack.providers());
  nlohmann::ordered_json j{{"kind", to_string(kind)}, {"scorer", stack.scorer->name()}};
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : report.entries) {
    out << e.id << ": " << (e.score ? fixed(*e.score, 4) : "n/a") << "\n";
    j["entries"].push_back({{"id", e.id},
                            {"output", e.output},
                            {"score", e.score ? nlohmann::ordered_json(*e.score) : nullptr},
                            {"reference", e.reference},
                            {"error", e.error}});
  }
  for (const auto& w : report.warnings) out << "warning: " << w << "\n";
  out << "baseline " << to_string(kind) << " mean " << stack.scorer->name() << ": "
      << (report.mean ? fixed(*report.mean, 4) : "undefined") << " over " << report.entries.size() << " records\n";
  j["mean"] = report.mean ? nlohmann::ordered_json(*report.mean) : nullptr;
  if (!o.out.empty()) detail::write_file_atomic(o.out, j.dump(2) + "\n");
  return kOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const OracleSpec spec = load_oracle_spec(o.oracle);
  MetaGraph initial;
  if (!o.checkpoint.empty()) {
    initial = load_checkpoint(o.checkpoint, 0.0);
  } else {
    std::vector<std::pair<LanguageId, double>> init;
    for (const auto& [code, u] : spec.utilities) init.emplace_back(LanguageId{code, code}, o.initial_probability);
    initial = build_meta_graph({o.source, o.source}, {o.target, o.target}, init, make_clock(o.clock, false)());
  }
  const std::uint64_t horizon = o.horizon.value_or(500);
  const RunConfig rc = make_run_config(o, horizon);
  SimulationConfig sc{rc.sampler, rc.evolution, horizon, o.seed};
  if (o.runs < 1) throw Error(ErrorKind::invalid_config, "--runs must be >= 1");

  std::string best;
  double best_u = -1.0;
  bool unique = true;
  for (const auto& [code, u] : spec.utilities) {
    if (u > best_u) {
      best = code;
      best_u = u;
      unique = true;
    } else if (u == best_u) {
      unique = false;
    }
  }

  std::size_t wins = 0;
  MetaGraph first;
  for (std::size_t r = 0; r < o.runs; ++r) {
    SimulationConfig run = sc;
    if (o.runs > 1) run.root_seed = derive_seed(o.seed, "run", r);
    std::optional<TraceWriter> writer;
    if (r == 0 && !o.trace.empty()) {
      std::vector<LanguageId> aux;
      for (const auto& a : initial.auxiliaries) aux.push_back(a.language);
      writer.emplace(o.trace, TraceHeader{initial.source, initial.target, aux});
    }
    std::function<void(const InstanceTrace&)> sink;
    if (writer) sink = [&](const InstanceTrace& t) { writer->write(t); };
    auto result = simulate(initial, spec, run, false, sink);
    const auto top = strict_top_language(result.graph);
    if (unique && top && *top == best) ++wins;
    if (r == 0) first = std::move(result.graph);
  }
  print_graph(out, first);
  if (unique) {
    out << "best-utility language '" << best << "' strictly highest in " << wins << "/" << o.runs << " run(s)\n";
  }
  if (!o.out.empty()) save_checkpoint(first, o.out);
  return kOk;
}

int cmd_report(const Options& o, std::ostream& out) {
  const TraceLog log = read_trace(o.trace);
  ReportOptions ro;
  if (!o.plot_dir.empty()) ro.plot_dir = o.plot_dir;
  const Report report = render_report(log, ro);
  out << report.text;
  if (!o.out.empty()) detail::write_file_atomic(o.out, report.text);
  return kOk;
}

void add_run_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--seed", o.seed, "Root seed for every random stream");
  cmd.add_option("--provider", o.provider, "Completion provider")->check(CLI::IsMember({"mock", "replay", "http"}));
  cmd.add_option("--scorer", o.scorer, "Translation scorer")->check(CLI::IsMember({"lexical", "mock", "remote"}));
  cmd.add_option("--pool", o.pool, "Shot pool dataset (defaults to --dataset)");
  cmd.add_option("--paths", o.paths, "Paths sampled per instance (K)");
  cmd.add_option("--path-length", o.path_length, "Auxiliaries per path (m), or sampled:w1,w2,...");
  cmd.add_option("--k-shot", o.k_shot, "Few-shot examples per prompt");
  cmd.add_option("--model", o.model, "Model name sent to the provider");
  cmd.add_option("--base-url", o.base_url, std::string("Chat endpoint base URL (or $") + kBaseUrlEnv + ")");
  cmd.add_option("--max-tokens", o.max_tokens, "Completion token limit");
  cmd.add_option("--temperature", o.temperature, "Sampling temperature");
  cmd.add_option("--max-in-flight", o.max_in_flight, "Concurrent live requests");
  cmd.add_option("--max-attempts", o.max_attempts, "Attempts per live request");
  cmd.add_option("--timeout-ms", o.timeout_ms, "Network timeout");
  cmd.add_option("--replay-log", o.replay_log, "Replay log served by --provider replay");
  cmd.add_option("--record-log", o.record_log, "Append every completion to this replay log");
  cmd.add_option("--mock-script", o.mock_script, "JSON lines {digest, text} overriding the mock provider");
  cmd.add_option("--scorer-url", o.scorer_url, "Remote scorer endpoint");
  cmd.add_option("--scorer-batch", o.scorer_batch, "Remote scorer batch size");
  cmd.add_option("--preamble", o.preamble, "Instruction placed before the examples");
  cmd.add_flag("--sequential", o.sequential, "Issue provider calls one at a time");
}

void add_evolution_options(CLI::App& cmd, Options& o) {
  cmd.add_option("--attribution", o.attribution, "Contribution attribution")
      ->check(CLI::IsMember({"as_printed", "exact", "exact_system"}));
  cmd.add_option("--lr", o.lr, "Initial learning rate");
  cmd.add_option("--schedule", o.schedule, "Learning-rate schedule")->check(CLI::IsMember({"inverse", "linear"}));
  cmd.add_option("--tau", o.tau, "Inverse-decay constant (default 0.1 * horizon)");
  cmd.add_option("--p-min", o.p_min, "Probability floor");
  cmd.add_option("--horizon", o.horizon, "Number of training instances");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Probability-driven meta-graph prompting for low-resource translation refinement", "pomp"};
  app.set_config("--config", "", "TOML/INI file with option defaults");
  app.require_subcommand(1);
  app.add_option("--clock", o.clock, "Timestamps: auto, wall or fixed ($SOURCE_DATE_EPOCH or 0)")
      ->check(CLI::IsMember({"auto", "wall", "fixed"}));

  auto* init = app.add_subcommand("init-graph", "Initialise a meta-graph from a dataset");
  init->add_option("--dataset", o.dataset, "Dataset with auxiliary translations")->required();
  init->add_option("--embedder", o.embedder, "Sentence embedder")
      ->check(CLI::IsMember({"identical", "fixed", "hashing", "http"}));
  init->add_option("--similarity", o.similarity, "Cosine returned by --embedder fixed");
  init->add_option("--embedder-url", o.embedder_url, "Endpoint for --embedder http");
  init->add_option("--timeout-ms", o.timeout_ms, "Network timeout");
  init->add_option("--out", o.out, "Checkpoint to write")->required();

  auto* tr = app.add_subcommand("train", "Evolve a meta-graph over a training stream");
  tr->add_option("--checkpoint", o.checkpoint, "Starting checkpoint")->required();
  tr->add_option("--dataset", o.dataset, "Training stream")->required();
  tr->add_option("--out", o.out, "Checkpoint to write")->required();
  tr->add_option("--trace", o.trace, "Trace log to append to");
  tr->add_option("--checkpoint-every", o.checkpoint_every, "Also checkpoint every N instances");
  tr->add_option("--resume-offset", o.resume_offset, "Stream offset to resume from");
  add_run_options(*tr, o);
  add_evolution_options(*tr, o);

  auto* inf = app.add_subcommand("infer", "Refine translations with a trained meta-graph");
  inf->add_option("--checkpoint", o.checkpoint, "Trained checkpoint")->required();
  inf->add_option("--dataset", o.dataset, "Records to translate")->required();
  inf->add_option("--out", o.out, "JSON lines output");
  inf->add_option("--inference", o.inference, "Path choice")->check(CLI::IsMember({"best_sampled", "greedy"}));
  add_run_options(*inf, o);

  auto* base = app.add_subcommand("baseline", "Few-shot translate / refine baselines");
  base->add_option("--kind", o.kind, "trans or refine")->check(CLI::IsMember({"trans", "refine"}));
  base->add_option("--dataset", o.dataset, "Test records")->required();
  base->add_option("--out", o.out, "JSON report");
  add_run_options(*base, o);

  auto* sim = app.add_subcommand("simulate", "Run graph evolution against a synthetic oracle");
  sim->add_option("--oracle", o.oracle, "Oracle spec (JSON)")->required();
  sim->add_option("--checkpoint", o.checkpoint, "Initial checkpoint (default: equal probabilities)");
  sim->add_option("--runs", o.runs, "Independent seeded runs");
  sim->add_option("--source", o.source, "Source code when no checkpoint is given");
  sim->add_option("--target", o.target, "Target code when no checkpoint is given");
  sim->add_option("--initial-probability", o.initial_probability, "Initial probability when no checkpoint is given");
  sim->add_option("--trace", o.trace, "Trace log of the first run");
  sim->add_option("--out", o.out, "Final checkpoint of the first run");
  sim->add_option("--seed", o.seed, "Root seed");
  sim->add_option("--paths", o.paths, "Paths sampled per instance (K)");
  sim->add_option("--path-length", o.path_length, "Auxiliaries per path (m)");
  add_evolution_options(*sim, o);

  auto* rep = app.add_subcommand("report", "Summarise a trace log");
  rep->add_option("--trace", o.trace, "Trace log")->required();
  rep->add_option("--plot-dir", o.plot_dir, "Directory for CSV and SVG plots");
  rep->add_option("--out", o.out, "Also write the text report here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (init->parsed()) return cmd_init_graph(o, out);
    if (tr->parsed()) return cmd_train(o, out);
    if (inf->parsed()) return cmd_infer(o, out);
    if (base->parsed()) return cmd_baseline(o, out);
    if (sim->parsed()) return cmd_simulate(o, out);
    if (rep->parsed()) return cmd_report(o, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    switch (category_of(e.kind())) {
      case ErrorCategory::config: return kConfigError;
      case ErrorCategory::data: return kDataError;
      case ErrorCategory::provider: return kProviderError;
      case ErrorCategory::internal: return kInternalError;
    }
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace pomp::cli
