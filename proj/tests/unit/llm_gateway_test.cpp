#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "docforge/fingerprint.hpp"
#include "docforge/llm_gateway.hpp"
#include "docforge/pipeline.hpp"
#include "local_server.hpp"
#include "support.hpp"

using namespace docforge;
using namespace docforge::llm;
namespace dt = docforge::testing;

namespace {

ModelConfig fast_config() {
  ModelConfig cfg;
  cfg.backoff_base = std::chrono::milliseconds(1);
  return cfg;
}

prompt::PromptText text_prompt(const std::string& text) { return prompt::make_prompt(text, false, 1 << 20); }

// Fails transiently `failures` times, then answers "ok".
class Scripted : public Provider {
public:
  explicit Scripted(int failures) : failures_(failures) {}
  ProviderReply send(const std::string&, const ModelConfig&) override {
    if (calls_++ < failures_) throw RetriableError("llm", "temporarily unavailable", 1);
    return {"ok", std::chrono::milliseconds(7)};
  }
  int calls() const { return calls_; }

private:
  int failures_;
  std::atomic<int> calls_{0};
};

template <typename E>
class Throwing : public Provider {
public:
  ProviderReply send(const std::string&, const ModelConfig&) override {
    ++calls;
    throw E("llm", "refused");
  }
  int calls = 0;
};

class Slow : public Provider {
public:
  ProviderReply send(const std::string& prompt, const ModelConfig&) override {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    return {prompt, {}};
  }
};

// A level-1 prompt for api/commits from the synthetic store.
prompt::PromptText level1_prompt(const std::string& context) {
  std::vector<GroundtruthSet> sets;
  for (int i = 0; i < 3; ++i) sets.push_back(dt::synthetic_set(RepositoryRef("org", "r" + std::to_string(i))));
  GroundtruthStore store(sets);
  auto shots = prompt::select_level1_shots(DocumentationType::api, DocumentationSource::commits, sets[0].repo, store);
  return prompt::build_level1_prompt(shots, context, DocumentationType::api);
}

std::map<MockKey, std::vector<Json>> api_table() {
  return {{{DocumentationType::api, DocumentationSource::commits},
           {dt::synthetic_entry(DocumentationType::api, 7, "canned")}}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Gateway

TEST(Gateway, RetriesTransientFailures) {
  auto provider = std::make_shared<Scripted>(2);
  auto cfg = fast_config();
  cfg.max_attempts = 5;
  Gateway gw(provider, cfg);
  auto raw = gw.complete(text_prompt("hello"));
  EXPECT_EQ(raw.text, "ok");
  EXPECT_EQ(raw.attempts_used, 3);
  EXPECT_EQ(raw.provider_latency, std::chrono::milliseconds(7));
  EXPECT_EQ(raw.model_id, cfg.model_id);
  EXPECT_EQ(gw.requests_sent(), 3);
}

TEST(Gateway, ExhaustedRetriesAreTerminal) {
  auto provider = std::make_shared<Scripted>(100);
  auto cfg = fast_config();
  cfg.max_attempts = 3;
  Gateway gw(provider, cfg);
  try {
    gw.complete(text_prompt("hello"));
    FAIL();
  } catch (const RetriesExhaustedError& e) {
    EXPECT_EQ(e.attempts(), 3);
  }
  EXPECT_EQ(provider->calls(), 3);
}

TEST(Gateway, OverBudgetPromptIsNeverSent) {
  auto provider = std::make_shared<Scripted>(0);
  auto cfg = fast_config();
  cfg.context_budget_chars = 10;
  Gateway gw(provider, cfg);
  EXPECT_THROW(gw.complete(text_prompt(std::string(11, 'a'))), InvalidArgument);
  EXPECT_EQ(provider->calls(), 0);
  EXPECT_EQ(gw.requests_sent(), 0);
  EXPECT_EQ(gw.complete(text_prompt(std::string(10, 'a'))).text, "ok");
}

TEST(Gateway, AuthenticationAndQuotaPassThroughWithoutRetry) {
  auto auth = std::make_shared<Throwing<AuthenticationError>>();
  EXPECT_THROW(Gateway(auth, fast_config()).complete(text_prompt("x")), AuthenticationError);
  EXPECT_EQ(auth->calls, 1);
  auto quota = std::make_shared<Throwing<QuotaError>>();
  EXPECT_THROW(Gateway(quota, fast_config()).complete(text_prompt("x")), QuotaError);
  EXPECT_EQ(quota->calls, 1);
}

TEST(Gateway, BoundsRequestsInFlight) {
  auto cfg = fast_config();
  cfg.max_parallel = 3;
  Gateway gw(std::make_shared<Slow>(), cfg);
  std::vector<std::thread> threads;
  for (int i = 0; i < 12; ++i) threads.emplace_back([&gw, i] { gw.complete(text_prompt(std::to_string(i))); });
  for (auto& t : threads) t.join();
  EXPECT_EQ(gw.requests_sent(), 12);
  EXPECT_LE(gw.peak_in_flight(), 3);
  EXPECT_GE(gw.peak_in_flight(), 2);
}

TEST(ModelConfig, Validation) {
  auto cfg = fast_config();
  cfg.max_attempts = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = fast_config();
  cfg.max_parallel = 0;
  EXPECT_THROW(Gateway(std::make_shared<Slow>(), cfg), InvalidArgument);
  EXPECT_THROW(Gateway(nullptr, fast_config()), InvalidArgument);
}

// ---------------------------------------------------------------------------
// Mock provider

TEST(MockProvider, PureFunctionOfPrompt) {
  MockProvider a(api_table()), b(api_table());
  auto p = level1_prompt("### 1 commit\nadds Widget7\n\n");
  auto first = a.send(p.text, {});
  EXPECT_EQ(a.send(p.text, {}).text, first.text);
  EXPECT_EQ(b.send(p.text, {}).text, first.text);
  EXPECT_EQ(first.latency, std::chrono::milliseconds(5 + p.text.size() / 1000));
}

TEST(MockProvider, DetectsKeyFromFirstExemplar) {
  auto p = level1_prompt("x");
  auto key = MockProvider::detect_key(p.text);
  ASSERT_TRUE(key);
  EXPECT_EQ(key->first, DocumentationType::api);
  EXPECT_EQ(key->second, DocumentationSource::commits);
  EXPECT_FALSE(MockProvider::detect_key("no exemplar here"));
}

TEST(MockProvider, AnswersCannedEntriesOrNothing) {
  MockProvider mock(api_table(), {false, {}});
  auto doc = pipeline::extract_doc_payload(mock.send(level1_prompt("something").text, {}).text);
  EXPECT_EQ(doc["entries"], Json(api_table().begin()->second));
  auto empty = pipeline::extract_doc_payload(mock.send(level1_prompt("").text, {}).text);
  EXPECT_TRUE(empty["entries"].empty());
  MockProvider blank({}, {false, {}});
  EXPECT_TRUE(pipeline::extract_doc_payload(blank.send(level1_prompt("something").text, {}).text)["entries"].empty());
}

TEST(MockProvider, WrapsTenPercentOfFingerprintsInProse) {
  MockProvider mock(api_table());
  int wrapped = 0, checked = 0;
  for (int i = 0; i < 200; ++i) {
    auto p = level1_prompt("### " + std::to_string(i) + " c\nbody\n\n");
    auto text = mock.send(p.text, {}).text;
    bool is_wrapped = fingerprint64(p.text) % 10 == 0;
    EXPECT_EQ(text.front() != '{', is_wrapped);
    EXPECT_EQ(pipeline::extract_doc_payload(text)["entries"], Json(api_table().begin()->second));
    wrapped += is_wrapped;
    ++checked;
  }
  EXPECT_GT(wrapped, 0);
  EXPECT_LT(wrapped, checked / 4);
}

TEST(MockProvider, FaultsFollowTheirScript) {
  MockKey key{DocumentationType::api, DocumentationSource::commits};
  auto p = level1_prompt("### 1 c\nbody\n\n");
  auto repair = prompt::with_repair_instruction(p);

  MockProvider truncated(api_table(), {false, {{key, MockFault::prose_wrapped_truncated_once}}});
  auto first = truncated.send(p.text, {}).text;
  EXPECT_NE(first.find("Sure!"), std::string::npos);
  EXPECT_THROW(pipeline::parse_completion({first, {}, 1, "m"}, DocumentationType::api,
                                          DocScope::single(DocumentationSource::commits)),
               Error);
  EXPECT_EQ(Json::parse(truncated.send(repair.text, {}).text)["entries"], Json(api_table().begin()->second));

  MockProvider garbage(api_table(), {false, {{key, MockFault::always_garbage}}});
  EXPECT_THROW(pipeline::extract_doc_payload(garbage.send(p.text, {}).text), pipeline::ExtractionError);
  EXPECT_THROW(pipeline::extract_doc_payload(garbage.send(repair.text, {}).text), pipeline::ExtractionError);
}

TEST(MockProvider, TableFromGroundtruth) {
  auto set = dt::synthetic_set(RepositoryRef("o", "r"));
  auto table = MockProvider::table_from_groundtruth(set);
  EXPECT_EQ(table.size(), 30u);
  EXPECT_EQ(table.at({DocumentationType::file, std::nullopt}), set.finals.at(DocumentationType::file).entries);
}

// ---------------------------------------------------------------------------
// HTTP provider

TEST(HttpProvider, PostsPromptAndReadsText) {
  dt::LocalServer local;
  Json seen;
  std::string auth;
  local.server().Post("/v1/complete", [&](const httplib::Request& req, httplib::Response& res) {
    seen = Json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(Json{{"text", "answer"}}.dump(), "application/json");
  });
  local.start();
  auto cfg = fast_config();
  cfg.base_url = local.url() + "/v1/complete";
  cfg.api_key = "k";
  HttpProvider http;
  EXPECT_EQ(http.send("the prompt", cfg).text, "answer");
  EXPECT_EQ(seen["prompt"], "the prompt");
  EXPECT_EQ(seen["model"], cfg.model_id);
  EXPECT_EQ(seen["temperature"], 0.0);
  EXPECT_EQ(seen["max_output"], cfg.max_output_chars);
  EXPECT_EQ(auth, "Bearer k");
}

TEST(HttpProvider, MapsStatusCodes) {
  dt::LocalServer local;
  local.server().Post("/auth", [](const httplib::Request&, httplib::Response& res) { res.status = 401; });
  local.server().Post("/quota", [](const httplib::Request&, httplib::Response& res) { res.status = 402; });
  local.server().Post("/busy", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  local.server().Post("/odd", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"answer\": 1}", "application/json");
  });
  local.start();
  HttpProvider http;
  auto at = [&](const std::string& path) {
    auto cfg = fast_config();
    cfg.base_url = local.url() + path;
    return cfg;
  };
  EXPECT_THROW(http.send("p", at("/auth")), AuthenticationError);
  EXPECT_THROW(http.send("p", at("/quota")), QuotaError);
  EXPECT_THROW(http.send("p", at("/busy")), RetriableError);
  EXPECT_THROW(http.send("p", at("/odd")), TerminalError);
  EXPECT_THROW(http.send("p", at("")), TerminalError);  // no handler: 404
}

TEST(HttpProvider, GatewayRetriesServerErrors) {
  dt::LocalServer local;
  std::atomic<int> hits{0};
  local.server().Post("/", [&](const httplib::Request&, httplib::Response& res) {
    if (++hits < 3) {
      res.status = 503;
      return;
    }
    res.set_content(Json{{"text", "finally"}}.dump(), "application/json");
  });
  local.start();
  auto cfg = fast_config();
  cfg.base_url = local.url();
  Gateway gw(std::make_shared<HttpProvider>(), cfg);
  auto raw = gw.complete(text_prompt("p"));
  EXPECT_EQ(raw.text, "finally");
  EXPECT_EQ(raw.attempts_used, 3);
}
