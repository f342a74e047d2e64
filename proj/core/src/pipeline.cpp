#include "docforge/pipeline.hpp"

#include <future>

#include "docforge/json_scan.hpp"

namespace docforge::pipeline {

namespace fs = std::filesystem;

namespace {

using RegionFilter = std::function<bool(std::string_view text, std::size_t open)>;

Json scan_for_json(std::string_view raw, const JsonFilter& accept, const RegionFilter& region) {
  auto ok = [&](const Json& j) { return !accept || accept(j); };
  Json whole = Json::parse(raw, nullptr, false);
  if (!whole.is_discarded() && ok(whole)) return whole;

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != '{' && raw[i] != '[') continue;
    if (region && !region(raw, i)) continue;
    auto end = json_scan::balanced_end(raw, i);
    if (!end) continue;
    Json value = Json::parse(raw.substr(i, *end - i), nullptr, false);
    if (!value.is_discarded() && ok(value)) return value;
    candidates.push_back(i);
  }
  std::string where;
  for (auto c : candidates) where += (where.empty() ? "" : ", ") + std::to_string(c);
  throw ExtractionError("no parseable JSON document in completion" +
                            (candidates.empty() ? std::string(" (no balanced region)")
                                                : " (rejected regions at offsets " + where + ")"),
                        std::move(candidates));
}

bool has_entries_array(const Json& value) {
  if (!value.is_object()) return false;
  auto it = value.find("entries");
  return it != value.end() && it->is_array();
}

bool is_object_array(const Json& value) {
  if (!value.is_array() || value.empty()) return false;
  for (const auto& item : value) {
    if (!item.is_object()) return false;
  }
  return true;
}

// A region right after `"key":` is a value inside a larger document, such
// as the members list of a cut-off api entry.
bool is_unkeyed(std::string_view text, std::size_t open) {
  auto skip_space = [&](std::size_t& i) {
    while (i > 0 && (text[i - 1] == ' ' || text[i - 1] == '\t' || text[i - 1] == '\n' || text[i - 1] == '\r')) --i;
  };
  std::size_t i = open;
  skip_space(i);
  if (i == 0 || text[i - 1] != ':') return true;
  --i;
  skip_space(i);
  return i == 0 || text[i - 1] != '"';
}

}  // namespace

Json extract_json(std::string_view raw, const JsonFilter& accept) { return scan_for_json(raw, accept, {}); }

bool is_doc_payload(const Json& value) { return has_entries_array(value) || is_object_array(value); }

Json extract_doc_payload(std::string_view raw) {
  try {
    return scan_for_json(raw, has_entries_array, {});
  } catch (const ExtractionError& first) {
    try {
      return scan_for_json(raw, is_object_array, is_unkeyed);
    } catch (const ExtractionError&) {
      throw first;
    }
  }
}

StructuredDoc parse_completion(const llm::RawCompletion& raw, DocumentationType type,
                               const DocScope& scope) {
  Json payload = extract_doc_payload(raw.text);
  StructuredDoc doc;
  doc.doc_type = type;
  doc.scope = scope;
  const Json& entries = payload.is_object() ? payload["entries"] : payload;
  doc.entries.assign(entries.begin(), entries.end());
  auto result = validate_schema(doc);
  if (!result.ok()) throw SchemaError("completion violates the schema: " + result.summary(), result);
  return doc;
}

// ---------------------------------------------------------------------------

namespace {

std::string now_rfc3339() {
  return format_rfc3339(std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now()));
}

void stamp(StructuredDoc& doc, const llm::RawCompletion& raw, const prompt::PromptText& prompt,
           const PipelineConfig& cfg) {
  doc.metadata.generated_at = cfg.clock ? cfg.clock() : now_rfc3339();
  doc.metadata.model_id = raw.model_id;
  doc.metadata.prompt_fingerprint = prompt.fingerprint;
  doc.metadata.truncated = prompt.truncated_context;
}

std::string pass_name(const DocScope& scope) {
  return scope.is_all_sources() ? "final" : std::string(to_string(scope.source()));
}

}  // namespace

PassOutcome repair_pass(const llm::RawCompletion& failed, const std::string& problem,
                        const prompt::PromptText& prompt, DocumentationType type, const DocScope& scope,
                        llm::Gateway& gateway, const PipelineConfig& cfg) {
  auto repaired_prompt = prompt::with_repair_instruction(prompt, cfg.prompt);
  auto raw = gateway.complete(repaired_prompt);
  PassOutcome outcome;
  outcome.llm_calls = 1;
  outcome.repairs = 1;
  outcome.latency = raw.provider_latency;
  outcome.raw_texts = {failed.text, raw.text};
  try {
    outcome.doc = parse_completion(raw, type, scope);
  } catch (const Error& e) {
    throw PassError(PassFailure{pass_name(scope),
                                "first attempt: " + problem + "; repair attempt: " + e.what(),
                                outcome.raw_texts, 1});
  }
  stamp(outcome.doc, raw, repaired_prompt, cfg);
  return outcome;
}

PassOutcome run_pass(const prompt::PromptText& prompt, DocumentationType type, const DocScope& scope,
                     llm::Gateway& gateway, const PipelineConfig& cfg) {
  auto raw = gateway.complete(prompt);
  std::string problem;
  try {
    PassOutcome outcome;
    outcome.doc = parse_completion(raw, type, scope);
    stamp(outcome.doc, raw, prompt, cfg);
    outcome.llm_calls = 1;
    outcome.latency = raw.provider_latency;
    outcome.raw_texts = {raw.text};
    return outcome;
  } catch (const ExtractionError& e) {
    problem = e.what();
  } catch (const SchemaError& e) {
    problem = e.what();
  }
  try {
    auto outcome = repair_pass(raw, problem, prompt, type, scope, gateway, cfg);
    outcome.llm_calls += 1;
    outcome.latency += raw.provider_latency;
    return outcome;
  } catch (PassError& e) {
    auto failure = e.failure();
    failure.llm_calls += 1;
    throw PassError(std::move(failure));
  }
}

Level1Error::Level1Error(std::vector<PassFailure> failures,
                         std::map<DocumentationSource, PassOutcome> succeeded)
    : TerminalError("level1",
                    [&] {
                      std::string names;
                      for (const auto& f : failures) names += (names.empty() ? "" : ", ") + f.pass;
                      return "level-1 passes failed for: " + names;
                    }()),
      failures_(std::move(failures)),
      succeeded_(std::move(succeeded)) {}

std::map<DocumentationSource, PassOutcome> run_level1(
    const std::map<DocumentationSource, SourceBundle>& bundles, DocumentationType type,
    const RepositoryRef& target, const GroundtruthStore& gt, llm::Gateway& gateway,
    const PipelineConfig& cfg) {
  for (auto source : kAllDocumentationSources) {
    if (!bundles.count(source)) {
      throw InvalidArgument("level1", "no bundle for source " + std::string(to_string(source)));
    }
  }
  // Prompts are built up front so selection or budget errors surface before
  // any request is sent.
  std::map<DocumentationSource, prompt::PromptText> prompts;
  for (auto source : kAllDocumentationSources) {
    auto shots = prompt::select_level1_shots(type, source, target, gt);
    prompts.emplace(source, prompt::build_level1_prompt(shots, bundles.at(source).extracted_text, type,
                                                        cfg.prompt));
  }

  std::map<DocumentationSource, std::future<PassOutcome>> running;
  for (auto source : cfg.launch_order) {
    if (running.count(source)) continue;
    running.emplace(source, std::async(std::launch::async, [&, source] {
                      return run_pass(prompts.at(source), type, DocScope::single(source), gateway, cfg);
                    }));
  }
  for (auto source : kAllDocumentationSources) {
    if (!running.count(source)) {
      running.emplace(source, std::async(std::launch::async, [&, source] {
                        return run_pass(prompts.at(source), type, DocScope::single(source), gateway, cfg);
                      }));
    }
  }

  std::map<DocumentationSource, PassOutcome> outcomes;
  std::vector<PassFailure> failures;
  for (auto source : kAllDocumentationSources) {
    try {
      outcomes.emplace(source, running.at(source).get());
    } catch (const PassError& e) {
      failures.push_back(e.failure());
    } catch (const std::exception& e) {
      failures.push_back(PassFailure{std::string(to_string(source)), e.what(), {}, 0});
    }
  }
  if (!failures.empty()) throw Level1Error(std::move(failures), std::move(outcomes));
  return outcomes;
}

PassOutcome run_level2(const std::map<DocumentationSource, StructuredDoc>& intermediates,
                       DocumentationType type, const RepositoryRef& target, const GroundtruthStore& gt,
                       llm::Gateway& gateway, const PipelineConfig& cfg) {
  for (const auto& [source, doc] : intermediates) {
    auto result = validate_schema(doc);
    if (!result.ok()) {
      throw InvalidArgument("level2", "intermediate for " + std::string(to_string(source)) +
                                          " is invalid: " + result.summary());
    }
  }
  auto exemplar = prompt::select_level2_exemplar(type, target, gt);
  auto prompt = prompt::build_level2_prompt(exemplar, intermediates, type, cfg.prompt);
  auto outcome = run_pass(prompt, type, DocScope::all_sources(), gateway, cfg);
  for (const auto& [source, doc] : intermediates) {
    outcome.doc.metadata.truncated = outcome.doc.metadata.truncated || doc.metadata.truncated;
  }
  return outcome;
}

// ---------------------------------------------------------------------------

Json PipelineRunReport::to_json() const {
  Json j;
  j["repo"] = repo.display();
  j["doc_type"] = to_string(doc_type);
  j["llm_calls"] = llm_calls;
  j["repairs"] = repairs;
  Json inter = Json::object();
  Json timings = Json::object();
  for (const auto& [source, doc] : intermediates) inter[std::string(to_string(source))] = doc_to_json(doc);
  for (const auto& [source, ms] : per_pass_timings) timings[std::string(to_string(source))] = ms.count();
  j["intermediates"] = std::move(inter);
  j["final"] = doc_to_json(final_doc);
  j["per_pass_timings_ms"] = std::move(timings);
  j["consolidation_timing_ms"] = consolidation_timing.count();
  return j;
}

fs::path output_dir(const fs::path& out, const RepositoryRef& repo, DocumentationType type) {
  return out / repo.dir_name() / std::string(to_string(type));
}

void write_run_outputs(const fs::path& out, const PipelineRunReport& report) {
  auto dir = output_dir(out, report.repo, report.doc_type);
  for (const auto& [source, doc] : report.intermediates) {
    write_doc_file(dir / ("intermediate_" + std::string(to_string(source)) + ".json"), doc);
  }
  write_doc_file(dir / "final.json", report.final_doc);
  write_text_file_atomic(dir / "report.json", report.to_json().dump(2) + "\n");
}

namespace {

void write_debug(const fs::path& out, const RepositoryRef& repo, DocumentationType type,
                 const PassFailure& failure) {
  if (out.empty()) return;
  auto dir = out / "debug" / repo.dir_name() / std::string(to_string(type));
  for (std::size_t i = 0; i < failure.raw_texts.size(); ++i) {
    write_text_file_atomic(dir / (failure.pass + "_attempt" + std::to_string(i + 1) + ".txt"),
                           failure.raw_texts[i]);
  }
  write_text_file_atomic(dir / (failure.pass + "_error.txt"), failure.reason + "\n");
}

}  // namespace

PipelineRunReport run_docfetch(const RepositoryRef& repo, DocumentationType type, const GroundtruthStore& gt,
                               llm::Gateway& gateway, const DocfetchOptions& options) {
  if (gateway.config().context_budget_chars != options.pipeline.prompt.budget_chars) {
    throw InvalidArgument("pipeline", "prompt budget and model context budget disagree");
  }
  std::map<DocumentationSource, SourceBundle> bundles;
  {
    std::map<DocumentationSource, std::future<SourceBundle>> fetching;
    for (auto source : kAllDocumentationSources) {
      fetching.emplace(source, std::async(std::launch::async, [&, source] {
                         return ingest::obtain_bundle(repo, source, options.ingestion, options.offline);
                       }));
    }
    std::string missing;
    std::exception_ptr first;
    for (auto& [source, future] : fetching) {
      try {
        bundles.emplace(source, future.get());
      } catch (const std::exception& e) {
        if (!first) first = std::current_exception();
        missing += std::string(missing.empty() ? "" : "; ") + e.what();
      }
    }
    if (first) {
      try {
        std::rethrow_exception(first);
      } catch (const RetriableError& e) {
        throw RetriableError("ingestion", missing, e.attempts());
      } catch (const AuthenticationError&) {
        throw AuthenticationError("ingestion", missing);
      } catch (const UnknownRepositoryError&) {
        throw UnknownRepositoryError("ingestion", missing);
      } catch (const std::exception&) {
        throw TerminalError("ingestion", missing);
      }
    }
  }

  PipelineRunReport report{repo, type, {}, {}, 0, 0, {}, {}};
  std::map<DocumentationSource, PassOutcome> level1;
  try {
    level1 = run_level1(bundles, type, repo, gt, gateway, options.pipeline);
  } catch (const Level1Error& e) {
    for (const auto& f : e.failures()) write_debug(options.out_dir, repo, type, f);
    throw;
  }
  for (auto& [source, outcome] : level1) {
    report.llm_calls += outcome.llm_calls;
    report.repairs += outcome.repairs;
    report.per_pass_timings[source] = outcome.latency;
    report.intermediates.emplace(source, outcome.doc);
  }

  try {
    auto final_outcome = run_level2(report.intermediates, type, repo, gt, gateway, options.pipeline);
    report.llm_calls += final_outcome.llm_calls;
    report.repairs += final_outcome.repairs;
    report.consolidation_timing = final_outcome.latency;
    report.final_doc = std::move(final_outcome.doc);
  } catch (const PassError& e) {
    write_debug(options.out_dir, repo, type, e.failure());
    throw TerminalError("level2", e.what());
  }

  if (!options.out_dir.empty()) write_run_outputs(options.out_dir, report);
  return report;
}

}  // namespace docforge::pipeline
