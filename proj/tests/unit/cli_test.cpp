#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "docforge/evalkit.hpp"
#include "local_server.hpp"
#include "support.hpp"

using namespace docforge;
namespace dt = docforge::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args, const cli::Hooks& hooks = {}) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err, hooks);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string gt_root() { return dt::fixture_path("groundtruth").string(); }
std::string archive_root() { return dt::fixture_path("archive").string(); }

std::vector<std::string> generate_args(const fs::path& work, const std::string& type) {
  return {"generate", "--repo", "acme/widgets", "--doc-type", type, "--out", (work / "out").string(),
          "--gt", gt_root(), "--archive", archive_root(), "--cache-dir", (work / "cache").string()};
}

}  // namespace

TEST(Cli, HelpListsEveryTypeAndSourceId) {
  auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("Documentation types: " + documentation_type_ids() + "\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("Documentation sources: " + documentation_source_ids() + "\n"), std::string::npos);
  auto sub = run({"generate", "--help"});
  EXPECT_EQ(sub.code, 0);
  EXPECT_NE(sub.out.find(documentation_type_ids()), std::string::npos);
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"ingest", "--repo", "justname"}).code, 1);
  EXPECT_EQ(run({"ingest", "--repo", "a/b", "--bogus"}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"ingest", "--repo", "a/b", "--source", "wiki"}).code, 1);
}

TEST(Cli, UnknownDocTypeListsValidIds) {
  dt::TempDir work;
  auto r = run(generate_args(work.path(), "architecture"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find(documentation_type_ids()), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(work.path() / "out"));
}

TEST(Cli, IngestWritesFiveBundles) {
  dt::TempDir work;
  std::vector<std::string> args = {"ingest", "--repo", "acme/widgets", "--archive", archive_root(), "--cache-dir",
                                   work.path().string()};
  auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  for (auto s : kAllDocumentationSources) {
    auto path = work.path() / "acme__widgets" / (std::string(to_string(s)) + ".jsonl");
    EXPECT_TRUE(fs::exists(path)) << path;
    EXPECT_NE(r.err.find(std::string(to_string(s)) + ": "), std::string::npos);
  }
  // Re-running changes nothing.
  auto before = dt::slurp(work.path() / "acme__widgets" / "commits.jsonl");
  EXPECT_EQ(run(args).code, 0);
  EXPECT_EQ(dt::slurp(work.path() / "acme__widgets" / "commits.jsonl"), before);
}

TEST(Cli, IngestSelectedSourcesOnly) {
  dt::TempDir work;
  auto r = run({"ingest", "--repo", "acme/widgets", "--archive", archive_root(), "--cache-dir", work.path().string(),
                "--source", "issues", "--source", "commits"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(work.path() / "acme__widgets")) ++files;
  EXPECT_EQ(files, 2u);
}

TEST(Cli, IngestFailureExitsTwoWithStage) {
  dt::LocalServer local;
  local.server().Get(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 401; });
  local.start();
  dt::TempDir work;
  auto r = run({"ingest", "--repo", "acme/widgets", "--api-base", local.url(), "--cache-dir", work.path().string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("ingestion"), std::string::npos) << r.err;
}

TEST(Cli, JsonLogsAreOneObjectPerLine) {
  dt::TempDir work;
  auto r = run({"--json-logs", "ingest", "--repo", "acme/widgets", "--archive", archive_root(), "--cache-dir",
                work.path().string(), "--source", "commits"});
  ASSERT_EQ(r.code, 0);
  std::istringstream lines(r.err);
  int count = 0;
  for (std::string line; std::getline(lines, line);) {
    auto j = Json::parse(line);
    EXPECT_TRUE(j.contains("event"));
    ++count;
  }
  EXPECT_GE(count, 1);
}

TEST(Cli, GenerateErrorDocMatchesFixture) {
  dt::TempDir work;
  auto r = run(generate_args(work.path(), "error"));
  ASSERT_EQ(r.code, 0) << r.err;
  auto final_doc = read_doc_file(work.path() / "out" / "acme__widgets" / "error" / "final.json");
  auto expected = read_doc_file(dt::fixture_path("groundtruth/acme__widgets/final_error.json"));
  EXPECT_EQ(final_doc.entries, expected.entries);
  EXPECT_EQ(final_doc.metadata.generated_at, "1970-01-01T00:00:00Z");
}

TEST(Cli, GenerateOfflineColdCacheExitsTwo) {
  dt::TempDir work;
  auto args = generate_args(work.path(), "api");
  args.push_back("--offline");
  auto r = run(args);
  EXPECT_EQ(r.code, 2);
  for (auto s : kAllDocumentationSources) EXPECT_NE(r.err.find(to_string(s)), std::string::npos) << r.err;
}

TEST(Cli, GeneratePersistentFaultExitsTwoNamingPass) {
  dt::TempDir work;
  auto args = generate_args(work.path(), "api");
  args.insert(args.end(), {"--mock-fault", "issues=garbage"});
  auto r = run(args);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("issues"), std::string::npos) << r.err;
  EXPECT_TRUE(fs::exists(work.path() / "out" / "debug" / "acme__widgets" / "api" / "issues_error.txt"));
}

TEST(Cli, GenerateClockHook) {
  dt::TempDir work;
  cli::Hooks hooks;
  hooks.clock = [] { return std::string("2030-01-01T00:00:00Z"); };
  ASSERT_EQ(run(generate_args(work.path(), "license"), hooks).code, 0);
  auto doc = read_doc_file(work.path() / "out" / "acme__widgets" / "license" / "final.json");
  EXPECT_EQ(doc.metadata.generated_at, "2030-01-01T00:00:00Z");
}

TEST(Cli, EvaluateGroundtruthAgainstItself) {
  auto r = run({"evaluate", "--generated", gt_root(), "--groundtruth", gt_root()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("| API | **1.00** | **1.00** | **1.00** | **1.00** | **1.00** |"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("0.9"), std::string::npos);
  // Idempotent.
  EXPECT_EQ(run({"evaluate", "--generated", gt_root(), "--groundtruth", gt_root()}).out, r.out);
}

TEST(Cli, EvaluateHookRendersGolden) {
  cli::Hooks hooks;
  hooks.evaluate = [](const fs::path&, const fs::path&) { return dt::reference_matrix(); };
  auto r = run({"evaluate", "--generated", gt_root(), "--groundtruth", gt_root()}, hooks);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, dt::slurp(dt::fixture_path("report/reference_tables.md")));

  dt::TempDir work;
  auto report = (work.path() / "r.csv").string();
  auto csv = run({"evaluate", "--generated", gt_root(), "--groundtruth", gt_root(), "--format", "csv", "--report", report},
                 hooks);
  ASSERT_EQ(csv.code, 0);
  EXPECT_TRUE(csv.out.empty());
  EXPECT_EQ(dt::slurp(report), dt::slurp(dt::fixture_path("report/reference_tables.csv")));
}

TEST(Cli, EvaluateEmptyGeneratedExitsTwo) {
  dt::TempDir empty;
  EXPECT_EQ(run({"evaluate", "--generated", empty.path().string(), "--groundtruth", gt_root()}).code, 2);
  EXPECT_EQ(run({"evaluate", "--generated", (empty.path() / "nope").string(), "--groundtruth", gt_root()}).code, 1);
}

TEST(Cli, ConfigFileSuppliesOptionsAndFlagsWin) {
  dt::TempDir work;
  auto config = work.path() / "docforge.toml";
  std::ofstream(config) << "[evaluate]\nformat = \"csv\"\n";
  cli::Hooks hooks;
  hooks.evaluate = [](const fs::path&, const fs::path&) { return dt::reference_matrix(); };
  auto from_file = run({"--config", config.string(), "evaluate", "--generated", gt_root(), "--groundtruth", gt_root()},
                       hooks);
  ASSERT_EQ(from_file.code, 0) << from_file.err;
  EXPECT_EQ(from_file.out.rfind("table,row,column,value\n", 0), 0u);
  auto overridden = run({"--config", config.string(), "evaluate", "--generated", gt_root(), "--groundtruth", gt_root(),
                         "--format", "md"},
                        hooks);
  EXPECT_EQ(overridden.out.rfind("## ", 0), 0u);
}
