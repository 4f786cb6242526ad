#include "pomp/runner.hpp"

#include <algorithm>
#include <exception>
#include <future>
#include <set>

#include "pomp/error.hpp"

namespace pomp {

const char* to_string(BaselineKind kind) { return kind == BaselineKind::trans ? "trans" : "refine"; }

void validate(const RunConfig& config, const MetaGraph& graph) {
  validate(config.sampler, graph);
  validate(config.evolution);
  if (config.max_output_tokens < 1) throw Error(ErrorKind::invalid_config, "max output tokens must be >= 1");
  if (!(config.temperature >= 0.0)) throw Error(ErrorKind::invalid_config, "temperature must be >= 0");
}

namespace {

struct CallOutcome {
  std::optional<CompletionResult> result;
  std::optional<Error> error;
};

CallOutcome call_once(CompletionProvider& llm, const CompletionRequest& request) {
  try {
    return {llm.complete(request), std::nullopt};
  } catch (const Error& e) {
    return {std::nullopt, e};
  }
}

// Results come back in request order regardless of completion order.
std::vector<CallOutcome> call_all(CompletionProvider& llm, const std::vector<CompletionRequest>& requests,
                                  bool parallel) {
  std::vector<CallOutcome> out(requests.size());
  if (!parallel || requests.size() < 2) {
    for (std::size_t i = 0; i < requests.size(); ++i) out[i] = call_once(llm, requests[i]);
    return out;
  }
  std::vector<std::future<CallOutcome>> futures;
  futures.reserve(requests.size());
  for (const auto& r : requests) {
    futures.push_back(std::async(std::launch::async, [&llm, &r] { return call_once(llm, r); }));
  }
  std::exception_ptr first_failure;
  for (std::size_t i = 0; i < futures.size(); ++i) {
    try {
      out[i] = futures[i].get();
    } catch (...) {
      if (!first_failure) first_failure = std::current_exception();
    }
  }
  if (first_failure) std::rethrow_exception(first_failure);
  return out;
}

CompletionRequest make_request(const RunConfig& config, std::string prompt, std::string tag) {
  CompletionRequest r;
  r.prompt = std::move(prompt);
  r.max_output_tokens = config.max_output_tokens;
  r.temperature = config.temperature;
  r.model_name = config.model_name;
  r.request_tag = std::move(tag);
  return r;
}

PromptLanguages prompt_languages(const MetaGraph& graph) { return {graph.source, graph.target}; }

// Distinct vertices across paths, in first-appearance order.
std::vector<LanguageId> distinct_vertices(const std::vector<TranslationPath>& paths) {
  std::vector<LanguageId> out;
  std::set<std::string> seen;
  for (const auto& p : paths) {
    for (const auto& v : p.vertices) {
      if (seen.insert(v.code).second) out.push_back(v);
    }
  }
  return out;
}

std::vector<std::string> codes_of(const std::vector<LanguageId>& langs) {
  std::vector<std::string> out;
  for (const auto& l : langs) out.push_back(l.code);
  return out;
}

// Generate over `vertices` and best-of selection; fills the trace's
// Generate section. Returns e_i keyed by code for vertices that produced
// a scored output.
std::map<std::string, double> run_generate(const ExampleRecord& record, std::uint64_t index, const MetaGraph& graph,
                                           const std::vector<LanguageId>& vertices, const Dataset& pool,
                                           const RunConfig& config, Providers providers, std::uint64_t stream_root,
                                           InstanceTrace& trace) {
  const auto langs = prompt_languages(graph);
  const auto required = codes_of(vertices);
  auto shot_rng = make_stream(stream_root, "shots/generate", index);
  const auto shots = draw_shots(pool, config.k_shot, required, shot_rng, record.id);

  std::vector<CompletionRequest> requests;
  for (const auto& v : vertices) {
    requests.push_back(make_request(
        config, build_generate_prompt(langs, v, shots, record, record.initial_translation, config.prompt),
        record.id + "/generate/" + v.code));
  }
  const auto outcomes = call_all(providers.llm, requests, config.parallel_calls);

  std::vector<std::pair<std::string, std::string>> candidates;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    VertexOutcome vo;
    vo.code = vertices[i].code;
    vo.prompt_digest = prompt_digest(requests[i].prompt);
    if (outcomes[i].result) {
      vo.output = outcomes[i].result->text;
      candidates.emplace_back(vo.code, *vo.output);
    } else {
      vo.error = outcomes[i].error->what();
      trace.warnings.push_back("generate '" + vo.code + "' failed: " + vo.error);
    }
    trace.generate.push_back(std::move(vo));
  }

  const auto selection = select_best(candidates, record.initial_translation, record.pseudo_reference, providers.scorer);
  std::map<std::string, double> e;
  for (const auto& cs : selection.candidates) {
    if (cs.score) e[cs.label] = *cs.score;
    auto it = std::find_if(trace.generate.begin(), trace.generate.end(),
                           [&](const VertexOutcome& v) { return v.code == cs.label; });
    it->score = cs.score;
    if (!cs.error.empty()) it->error = "scoring failed: " + cs.error;
  }
  trace.refined_text = selection.text;
  trace.refined_label = selection.label;
  trace.refined_score = selection.score;
  trace.initial_score = selection.initial_score;
  for (const auto& w : selection.warnings) trace.warnings.push_back(w);
  return e;
}

std::optional<double> score_or_warn(Scorer& scorer, const std::string& text, const std::string& reference,
                                    InstanceTrace& trace, const std::string& what) {
  try {
    return scorer.score(text, reference).value;
  } catch (const Error& e) {
    trace.warnings.push_back("scoring " + what + " failed: " + e.what());
    return std::nullopt;
  }
}

}  // namespace

InstanceResult train_instance(const ExampleRecord& record, std::uint64_t index, const MetaGraph& graph,
                              const Dataset& pool, const RunConfig& config, Providers providers) {
  validate(config, graph);
  InstanceTrace trace;
  trace.index = index;
  trace.record_id = record.id;
  trace.probabilities_before = probability_snapshot(graph);
  trace.revision_before = graph.revision;

  auto sample_rng = make_stream(config.root_seed, "sample", index);
  const auto paths = sample_paths(graph, config.sampler, sample_rng);
  const auto vertices = distinct_vertices(paths);

  const auto e = run_generate(record, index, graph, vertices, pool, config, providers, config.root_seed, trace);

  const auto langs = prompt_languages(graph);
  auto agg_rng = make_stream(config.root_seed, "shots/aggregate", index);
  const auto agg_shots = draw_shots(pool, config.k_shot, codes_of(vertices), agg_rng, record.id);
  std::vector<CompletionRequest> requests;
  for (std::size_t k = 0; k < paths.size(); ++k) {
    requests.push_back(make_request(
        config,
        build_aggregate_prompt(langs, paths[k].vertices, agg_shots, record, trace.refined_text, config.prompt),
        record.id + "/aggregate/" + std::to_string(k) + "/" + path_signature(paths[k])));
  }
  const auto outcomes = call_all(providers.llm, requests, config.parallel_calls);

  MetaGraph current = graph;
  const double lr = learning_rate(index, config.evolution);
  for (std::size_t k = 0; k < paths.size(); ++k) {
    PathOutcome po;
    po.vertices = codes_of(paths[k].vertices);
    po.joint_probability = paths[k].joint_probability;
    po.prompt_digest = prompt_digest(requests[k].prompt);
    po.learning_rate = lr;
    const std::string label = "path " + std::to_string(k) + " (" + path_signature(paths[k]) + ")";
    if (outcomes[k].result) {
      po.output = outcomes[k].result->text;
      po.aggregate_score =
          score_or_warn(providers.scorer, *po.output, record.pseudo_reference, trace, "aggregate of " + label);
    } else {
      po.skip_reason = std::string("aggregate failed: ") + outcomes[k].error->what();
    }
    bool complete = po.aggregate_score.has_value();
    for (const auto& code : po.vertices) {
      const auto it = e.find(code);
      if (it == e.end()) {
        complete = false;
        if (po.skip_reason.empty()) po.skip_reason = "vertex '" + code + "' has no Generate score";
        continue;
      }
      po.vertex_scores.push_back(it->second);
    }
    if (!complete) {
      if (po.skip_reason.empty()) po.skip_reason = "aggregate output could not be scored";
      trace.warnings.push_back(label + " skipped: " + po.skip_reason);
      po.vertex_scores.clear();
      trace.paths.push_back(std::move(po));
      continue;
    }
    const auto rv = compute_rewards(PathScores{*po.aggregate_score, po.vertex_scores}, config.evolution.attribution);
    po.contributions = rv.contributions;
    po.rewards = rv.rewards;
    if (lr > 0.0) {
      current = apply_update(current, paths[k], rv.rewards, lr, config.evolution.p_min);
      po.updated = true;
    } else {
      po.skip_reason = "learning rate is zero";
    }
    trace.paths.push_back(std::move(po));
  }

  trace.probabilities_after = probability_snapshot(current);
  trace.revision_after = current.revision;
  return {std::move(current), std::move(trace)};
}

TrainResult train(const Dataset& stream, const Dataset& pool, MetaGraph graph, const RunConfig& config,
                  Providers providers, const TrainOptions& options) {
  validate(config, graph);
  if (config.horizon > 0 && stream.records.empty()) {
    throw Error(ErrorKind::invalid_input, "training stream is empty");
  }
  std::optional<TraceWriter> writer;
  if (options.trace_path) {
    writer.emplace(*options.trace_path,
                   TraceHeader{graph.source, graph.target, [&] {
                                 std::vector<LanguageId> aux;
                                 for (const auto& a : graph.auxiliaries) aux.push_back(a.language);
                                 return aux;
                               }()});
  }
  TrainResult result;
  for (std::uint64_t t = options.start_offset; t < config.horizon; ++t) {
    const auto& record = stream.records[t % stream.records.size()];
    auto step = train_instance(record, t, graph, pool, config, providers);
    graph = std::move(step.graph);
    if (options.clock && step.trace.revision_after != step.trace.revision_before) graph.updated_at = options.clock();
    if (writer) writer->write(step.trace);
    if (options.on_instance) options.on_instance(step.trace);
    result.traces.push_back(std::move(step.trace));
    const bool last = t + 1 == config.horizon;
    if (options.checkpoint_path && config.checkpoint_every > 0 && (t + 1) % config.checkpoint_every == 0 && !last) {
      save_checkpoint(graph, *options.checkpoint_path);
    }
  }
  if (options.checkpoint_path) save_checkpoint(graph, *options.checkpoint_path);
  result.graph = std::move(graph);
  return result;
}

InferenceResult infer(const ExampleRecord& record, std::uint64_t index, const MetaGraph& graph, const Dataset& pool,
                      const RunConfig& config, Providers providers) {
  validate(config, graph);
  InferenceResult out;
  InstanceTrace& trace = out.trace;
  trace.index = index;
  trace.record_id = record.id;
  trace.probabilities_before = probability_snapshot(graph);
  trace.probabilities_after = trace.probabilities_before;
  trace.revision_before = trace.revision_after = graph.revision;

  if (config.inference == InferencePath::greedy) {
    std::size_t m = 1;
    if (const auto* fixed = std::get_if<FixedLength>(&config.sampler.path_length)) {
      m = fixed->m;
    } else {
      const auto& w = std::get<SampledLength>(config.sampler.path_length).weights;
      m = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin()) + 1;
    }
    out.path = greedy_path(graph, m);
  } else {
    const std::uint64_t infer_root = derive_seed(config.root_seed, "infer");
    auto rng = make_stream(infer_root, "sample", index);
    const auto paths = sample_paths(graph, config.sampler, rng);
    std::size_t best = 0;
    for (std::size_t k = 1; k < paths.size(); ++k) {
      if (paths[k].joint_probability > paths[best].joint_probability) best = k;
    }
    out.path = paths[best];
  }

  const std::uint64_t infer_root = derive_seed(config.root_seed, "infer");
  run_generate(record, index, graph, out.path.vertices, pool, config, providers, infer_root, trace);
  out.refined_text = trace.refined_text;

  auto agg_rng = make_stream(infer_root, "shots/aggregate", index);
  const auto shots = draw_shots(pool, config.k_shot, codes_of(out.path.vertices), agg_rng, record.id);
  const auto request = make_request(
      config, build_aggregate_prompt(prompt_languages(graph), out.path.vertices, shots, record, out.refined_text,
                                     config.prompt),
      record.id + "/infer/" + path_signature(out.path));
  PathOutcome po;
  po.vertices = codes_of(out.path.vertices);
  po.joint_probability = out.path.joint_probability;
  po.prompt_digest = prompt_digest(request.prompt);
  po.skip_reason = "inference";
  const auto outcome = call_once(providers.llm, request);
  if (outcome.result) {
    po.output = outcome.result->text;
    out.text = *po.output;
  } else {
    out.text = out.refined_text;
    out.fallback = true;
    trace.warnings.push_back(std::string("aggregate failed, returning the refined translation: ") +
                             outcome.error->what());
  }
  trace.paths.push_back(std::move(po));
  return out;
}

BaselineReport run_baseline(BaselineKind kind, const Dataset& test, const Dataset& pool, const RunConfig& config,
                            Providers providers) {
  BaselineReport report;
  report.kind = kind;
  const PromptLanguages langs{test.source, test.target};
  double sum = 0.0;
  std::size_t scored = 0;
  for (std::size_t i = 0; i < test.records.size(); ++i) {
    const auto& record = test.records[i];
    BaselineEntry entry;
    entry.id = record.id;
    auto rng = make_stream(config.root_seed, std::string("shots/") + to_string(kind), i);
    const auto shots = draw_shots(pool, config.k_shot, {}, rng, record.id);
    const std::string prompt = kind == BaselineKind::trans ? build_trans_prompt(langs, shots, record, config.prompt)
                                                           : build_refine_prompt(langs, shots, record, config.prompt);
    const auto outcome = call_once(providers.llm, make_request(config, prompt, record.id + "/" + to_string(kind)));
    if (!outcome.result) {
      entry.error = outcome.error->what();
      report.warnings.push_back("record '" + record.id + "': " + entry.error);
      report.entries.push_back(std::move(entry));
      continue;
    }
    entry.output = outcome.result->text;
    const bool gold = record.gold_reference.has_value();
    entry.reference = gold ? "gold" : "pseudo";
    try {
      entry.score = providers.scorer.score(entry.output, gold ? *record.gold_reference : record.pseudo_reference).value;
      sum += *entry.score;
      ++scored;
    } catch (const Error& e) {
      entry.error = std::string("scoring failed: ") + e.what();
      report.warnings.push_back("record '" + record.id + "': " + entry.error);
    }
    report.entries.push_back(std::move(entry));
  }
  if (scored > 0) {
    report.mean = sum / static_cast<double>(scored);
  } else {
    report.warnings.push_back("no record was scored; mean is undefined");
  }
  return report;
}

}  // namespace pomp
