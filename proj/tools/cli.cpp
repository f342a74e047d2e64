#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <ostream>

#include "docforge/groundtruth.hpp"
#include "docforge/ingestion.hpp"
#include "docforge/llm_gateway.hpp"
#include "docforge/pipeline.hpp"
#include "docforge/timestamp.hpp"

namespace docforge::cli {

namespace fs = std::filesystem;

namespace {

/// Progress output on stderr, either plain lines or one JSON object per line.
class Log {
public:
  Log(std::ostream& err, const bool& json) : err_(err), json_(json) {}

  void info(const std::string& event, const std::string& message, Json fields = Json::object()) {
    emit("info", event, message, std::move(fields));
  }
  void warn(const std::string& event, const std::string& message) { emit("warning", event, message, {}); }
  void error(const std::string& stage, const std::string& message) {
    emit("error", stage, message, Json::object());
  }

private:
  void emit(const char* level, const std::string& event, const std::string& message, Json fields) {
    if (json_) {
      if (!fields.is_object()) fields = Json::object();
      fields["level"] = level;
      fields["event"] = event;
      fields["message"] = message;
      err_ << fields.dump() << "\n";
    } else if (std::string_view(level) == "info") {
      err_ << message << "\n";
    } else {
      err_ << "docforge: " << level << " [" << event << "]: " << message << "\n";
    }
  }

  std::ostream& err_;
  const bool& json_;
};

CLI::Validator repo_validator() {
  return CLI::Validator(
      [](std::string& value) -> std::string {
        try {
          RepositoryRef::parse(value);
          return {};
        } catch (const std::exception& e) {
          return e.what();
        }
      },
      "OWNER/NAME", "repository");
}

CLI::Validator doc_type_validator() {
  return CLI::Validator(
      [](std::string& value) -> std::string {
        if (parse_documentation_type(value)) return {};
        return "unknown documentation type '" + value + "'; valid ids: " + documentation_type_ids();
      },
      "TYPE", "doc type");
}

CLI::Validator source_validator() {
  return CLI::Validator(
      [](std::string& value) -> std::string {
        if (parse_documentation_source(value)) return {};
        return "unknown documentation source '" + value + "'; valid ids: " + documentation_source_ids();
      },
      "SOURCE", "doc source");
}

/// `<target>` or `<target>=truncated|garbage`, target a source id or "final".
CLI::Validator fault_validator() {
  return CLI::Validator(
      [](std::string& value) -> std::string {
        auto eq = value.find('=');
        auto target = value.substr(0, eq);
        if (target != "final" && !parse_documentation_source(target)) {
          return "unknown fault target '" + target + "'; use final or one of: " + documentation_source_ids();
        }
        if (eq != std::string::npos) {
          auto kind = value.substr(eq + 1);
          if (kind != "truncated" && kind != "garbage") return "unknown fault kind '" + kind + "'";
        }
        return {};
      },
      "TARGET[=truncated|garbage]", "mock fault");
}

struct CommonOptions {
  std::string repo;
  fs::path cache_dir = ".docforge-cache";
  std::string archive;
  std::string api_base;
  int max_records = 0;
};

void add_ingestion_flags(CLI::App& cmd, CommonOptions& o) {
  cmd.add_option("--repo", o.repo, "Repository as owner/name")->required()->check(repo_validator());
  cmd.add_option("--cache-dir", o.cache_dir, "Bundle cache directory")->capture_default_str();
  cmd.add_option("--archive", o.archive, "Read artifacts from a fixture archive instead of the network")
      ->check(CLI::ExistingDirectory);
  cmd.add_option("--api-base", o.api_base, "Hosting API base URL");
  cmd.add_option("--max-records", o.max_records, "Records kept per source")->check(CLI::PositiveNumber);
}

ingest::IngestionConfig ingestion_config(const CommonOptions& o, Log& log) {
  ingest::IngestionConfig cfg;
  cfg.cache_dir = o.cache_dir;
  if (!o.archive.empty()) cfg.archive_dir = fs::path(o.archive);
  if (!o.api_base.empty()) cfg.api_base_url = o.api_base;
  if (o.max_records > 0) cfg.max_records_per_source = o.max_records;
  cfg.on_warning = [&log](std::string_view message) { log.warn("ingestion", std::string(message)); };
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------

int cmd_ingest(const CommonOptions& o, const std::vector<std::string>& source_ids, Log& log) {
  auto repo = RepositoryRef::parse(o.repo);
  auto cfg = ingestion_config(o, log);
  std::vector<DocumentationSource> sources;
  for (const auto& id : source_ids) {
    auto s = *parse_documentation_source(id);
    if (std::find(sources.begin(), sources.end(), s) == sources.end()) sources.push_back(s);
  }
  if (sources.empty()) sources.assign(kAllDocumentationSources.begin(), kAllDocumentationSources.end());

  for (auto source : sources) {
    auto bundle = ingest::build_bundle(repo, source, ingest::fetch_artifacts(repo, source, cfg));
    auto path = ingest::cache_store(bundle, cfg);
    log.info("ingest.source",
             std::string(to_string(source)) + ": " + std::to_string(bundle.records.size()) + " records -> " +
                 path.string(),
             {{"source", to_string(source)}, {"records", bundle.records.size()}, {"path", path.string()}});
  }
  return kSuccess;
}

struct GenerateOptions {
  std::string doc_type;
  fs::path out;
  fs::path gt;
  std::string provider = "mock";
  bool offline = false;
  std::string mock_fixtures;
  std::vector<std::string> mock_faults;
  std::string llm_url;
  std::string model;
};

std::function<std::string()> generation_clock(const GenerateOptions& g, const Hooks& hooks) {
  if (hooks.clock) return hooks.clock;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    char* end = nullptr;
    long long seconds = std::strtoll(epoch, &end, 10);
    if (*end != '\0' || seconds < 0) throw InvalidArgument("cli", "SOURCE_DATE_EPOCH must be a non-negative integer");
    auto stamp = format_rfc3339(Timestamp{std::chrono::seconds{seconds}});
    return [stamp] { return stamp; };
  }
  if (g.provider == "mock") {
    // The mock is deterministic end to end, so the stamp is too.
    auto stamp = format_rfc3339(Timestamp{});
    return [stamp] { return stamp; };
  }
  return {};
}

std::shared_ptr<llm::Provider> make_provider(const RepositoryRef& repo, DocumentationType type,
                                             const GenerateOptions& g, Log& log) {
  if (g.provider == "http") return std::make_shared<llm::HttpProvider>();

  fs::path fixtures = g.mock_fixtures.empty() ? g.gt / repo.dir_name() : fs::path(g.mock_fixtures);
  std::map<llm::MockKey, std::vector<Json>> table;
  if (fs::is_directory(fixtures)) {
    table = llm::MockProvider::table_from_groundtruth(load_groundtruth_set(fixtures));
  } else {
    log.warn("llm", "no mock fixtures at " + fixtures.string() + "; the mock answers with empty entries");
  }
  llm::MockOptions options;
  for (const auto& spec : g.mock_faults) {
    auto eq = spec.find('=');
    auto target = spec.substr(0, eq);
    auto kind = eq == std::string::npos ? std::string("truncated") : spec.substr(eq + 1);
    std::optional<DocumentationSource> source;
    if (target != "final") source = parse_documentation_source(target);
    options.faults[{type, source}] =
        kind == "garbage" ? llm::MockFault::always_garbage : llm::MockFault::prose_wrapped_truncated_once;
  }
  return std::make_shared<llm::MockProvider>(std::move(table), std::move(options));
}

int cmd_generate(const CommonOptions& o, const GenerateOptions& g, const Hooks& hooks, Log& log) {
  auto repo = RepositoryRef::parse(o.repo);
  auto type = *parse_documentation_type(g.doc_type);

  pipeline::DocfetchOptions options;
  options.ingestion = ingestion_config(o, log);
  options.offline = g.offline;
  options.out_dir = g.out;
  options.pipeline.clock = generation_clock(g, hooks);

  llm::ModelConfig model;
  model.provider_id = g.provider;
  if (!g.model.empty()) model.model_id = g.model;
  if (g.provider == "http") {
    if (g.llm_url.empty()) throw InvalidArgument("cli", "--provider http needs --llm-url");
    model.base_url = g.llm_url;
  }
  model.context_budget_chars = options.pipeline.prompt.budget_chars;
  model.validate();

  auto gt = load_groundtruth_store(g.gt);
  llm::Gateway gateway(make_provider(repo, type, g, log), model);

  log.info("generate.start", "generating " + std::string(to_string(type)) + " documentation for " + repo.display(),
           {{"repo", repo.display()}, {"doc_type", to_string(type)}});
  auto report = pipeline::run_docfetch(repo, type, gt, gateway, options);
  auto dir = pipeline::output_dir(g.out, repo, type);
  log.info("generate.done",
           "wrote " + dir.string() + " (llm calls " + std::to_string(report.llm_calls) + ", repairs " +
               std::to_string(report.repairs) + ")",
           {{"dir", dir.string()}, {"llm_calls", report.llm_calls}, {"repairs", report.repairs}});
  return kSuccess;
}

struct EvaluateOptions {
  fs::path generated;
  fs::path groundtruth;
  std::string report;
  std::string format = "md";
};

int cmd_evaluate(const EvaluateOptions& e, const Hooks& hooks, std::ostream& out, Log& log) {
  auto matrix = hooks.evaluate ? hooks.evaluate(e.generated, e.groundtruth)
                               : eval::evaluate_corpus(e.generated, e.groundtruth);
  for (const auto& note : matrix.coverage_notes) log.warn("evaluate", "not scored: " + note);
  auto text = eval::render_report(matrix, e.format == "csv" ? eval::ReportFormat::csv : eval::ReportFormat::markdown);
  if (e.report.empty()) {
    out << text;
  } else {
    write_text_file_atomic(e.report, text);
    log.info("evaluate.done", "report written to " + e.report, {{"path", e.report}});
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Hooks& hooks) {
  CLI::App app{"Generates structured project documentation from repository artifacts.", "docforge"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML/INI file; command-line flags win");
  bool json_logs = false;
  app.add_flag("--json-logs", json_logs, "Emit progress as one JSON object per line on stderr");

  const std::string source_help = "Source id, repeatable (" + documentation_source_ids() + ")";
  const std::string type_help = "Documentation type id (" + documentation_type_ids() + ")";
  app.footer("Documentation types: " + documentation_type_ids() + "\nDocumentation sources: " +
             documentation_source_ids() + "\n\nExit codes: 0 success, 1 usage error, 2 runtime failure.");

  CommonOptions common;
  std::vector<std::string> sources;
  auto* ingest_cmd = app.add_subcommand("ingest", "Fetch artifacts and cache one bundle per source");
  add_ingestion_flags(*ingest_cmd, common);
  ingest_cmd->add_option("--source", sources, source_help)->check(source_validator());

  GenerateOptions gen;
  auto* generate_cmd = app.add_subcommand("generate", "Run both pipeline levels for one documentation type");
  add_ingestion_flags(*generate_cmd, common);
  generate_cmd->add_option("--doc-type", gen.doc_type, type_help)->required()->check(doc_type_validator());
  generate_cmd->add_option("--out", gen.out, "Output directory")->required();
  generate_cmd->add_option("--gt", gen.gt, "Groundtruth root (shot donors)")->required()->check(CLI::ExistingDirectory);
  generate_cmd->add_option("--provider", gen.provider, "Model provider")
      ->check(CLI::IsMember({"mock", "http"}))
      ->capture_default_str();
  generate_cmd->add_flag("--offline", gen.offline, "Use cached bundles only");
  generate_cmd->add_option("--mock-fixtures", gen.mock_fixtures,
                           "Canned mock answers (default: <gt>/<owner>__<name>)");
  generate_cmd->add_option("--mock-fault", gen.mock_faults, "Scripted mock fault, repeatable (" +
                                                                documentation_source_ids() + ", final)")
      ->check(fault_validator());
  generate_cmd->add_option("--llm-url", gen.llm_url, "HTTP provider endpoint");
  generate_cmd->add_option("--model", gen.model, "Model id sent to the provider");

  EvaluateOptions ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score generated documents against groundtruth");
  evaluate_cmd->add_option("--generated", ev.generated, "Generated output root")->required()->check(CLI::ExistingDirectory);
  evaluate_cmd->add_option("--groundtruth", ev.groundtruth, "Groundtruth root")
      ->required()
      ->check(CLI::ExistingDirectory);
  evaluate_cmd->add_option("--report", ev.report, "Write the report here instead of stdout");
  evaluate_cmd->add_option("--format", ev.format, "Report format")->check(CLI::IsMember({"md", "csv"}))->capture_default_str();

  // CLI11 consumes a reversed argument vector.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  Log log(err, json_logs);
  try {
    if (ingest_cmd->parsed()) return cmd_ingest(common, sources, log);
    if (generate_cmd->parsed()) return cmd_generate(common, gen, hooks, log);
    return cmd_evaluate(ev, hooks, out, log);
  } catch (const Error& e) {
    log.error(e.stage(), e.what());
  } catch (const std::exception& e) {
    log.error("internal", e.what());
  }
  return kRuntime;
}

}  // namespace docforge::cli
