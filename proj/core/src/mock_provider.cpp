#include "docforge/fingerprint.hpp"
#include "docforge/json_scan.hpp"
#include "docforge/llm_gateway.hpp"

namespace docforge::llm {

namespace {

bool ends_with(std::string_view text, std::string_view suffix) {
  return text.size() >= suffix.size() && text.substr(text.size() - suffix.size()) == suffix;
}

// True when every intermediate section of a consolidation context parses
// and carries no entries. A cut section counts as content.
bool all_sections_empty(std::string_view context) {
  const std::string marker = std::string(prompt::kBlockMarker) + "intermediate ";
  bool any = false;
  for (auto pos = context.find(marker); pos != std::string_view::npos; pos = context.find(marker, pos + 1)) {
    auto open = context.find('{', pos);
    if (open == std::string_view::npos) return false;
    auto end = json_scan::balanced_end(context, open);
    if (!end) return false;
    Json j = Json::parse(context.substr(open, *end - open), nullptr, false);
    if (j.is_discarded() || !j.contains("entries") || !j["entries"].empty()) return false;
    any = true;
  }
  return any;
}

}  // namespace

MockProvider::MockProvider(std::map<MockKey, std::vector<Json>> table, MockOptions options)
    : table_(std::move(table)), options_(std::move(options)) {}

std::map<MockKey, std::vector<Json>> MockProvider::table_from_groundtruth(const GroundtruthSet& set) {
  std::map<MockKey, std::vector<Json>> table;
  for (const auto& [key, doc] : set.intermediates) {
    table[{key.first, key.second}] = doc.entries;
  }
  for (const auto& [type, doc] : set.finals) table[{type, std::nullopt}] = doc.entries;
  return table;
}

std::optional<MockKey> MockProvider::detect_key(std::string_view prompt) {
  for (auto pos = prompt.find(prompt::kOutputLabel); pos != std::string_view::npos;
       pos = prompt.find(prompt::kOutputLabel, pos + 1)) {
    auto open = pos + prompt::kOutputLabel.size();
    auto end = json_scan::balanced_end(prompt, open);
    if (!end) continue;
    Json j = Json::parse(prompt.substr(open, *end - open), nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("doc_type") || !j.contains("scope")) continue;
    try {
      auto doc = doc_from_json(j);
      if (doc.scope.is_all_sources()) return MockKey{doc.doc_type, std::nullopt};
      return MockKey{doc.doc_type, doc.scope.source()};
    } catch (const std::exception&) {
      continue;
    }
  }
  return std::nullopt;
}

ProviderReply MockProvider::send(const std::string& prompt, const ModelConfig&) {
  const std::chrono::milliseconds latency{5 + static_cast<long>(prompt.size() / 1000)};
  auto key = detect_key(prompt);
  if (!key) return {"I could not find an example output to follow in this prompt.", latency};

  std::string_view body = prompt;
  const std::string repair_suffix = "\n" + std::string(prompt::kRepairInstruction);
  const bool repair = ends_with(body, repair_suffix);
  if (repair) body.remove_suffix(repair_suffix.size());
  bool empty_context = ends_with(body, std::string(prompt::kInputLabel) + std::string(prompt::kFinalOutputLabel));
  if (!empty_context && !key->second) {
    auto context_start = body.rfind(prompt::kInputLabel);
    empty_context = all_sections_empty(body.substr(context_start + prompt::kInputLabel.size()));
  }

  Json out;
  out["doc_type"] = to_string(key->first);
  out["scope"] = key->second ? Json{{"kind", "single_source"}, {"source", to_string(*key->second)}}
                             : Json{{"kind", "all_sources"}};
  out["entries"] = Json::array();
  if (!empty_context) {
    if (auto it = table_.find(*key); it != table_.end()) out["entries"] = Json(it->second);
  }
  std::string json = out.dump();

  if (auto fault = options_.faults.find(*key); fault != options_.faults.end()) {
    switch (fault->second) {
      case MockFault::always_garbage:
        return {"I am unable to produce structured output for this input.", latency};
      case MockFault::prose_wrapped_truncated_once:
        if (!repair) {
          return {"Sure! Here is the documentation you asked for:\n" + json.substr(0, json.size() / 2) +
                      "\n... the rest is omitted for brevity.",
                  latency};
        }
        break;
    }
  }
  if (options_.prose_wrapping && fingerprint64(prompt) % 10 == 0) {
    return {"Here is the generated documentation in the requested format:\n```json\n" + json +
                "\n```\nLet me know if you need anything else.",
            latency};
  }
  return {std::move(json), latency};
}

}  // namespace docforge::llm
