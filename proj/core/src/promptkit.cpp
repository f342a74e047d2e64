#include "docforge/promptkit.hpp"

#include <random>
#include <vector>

#include "docforge/fingerprint.hpp"
#include "docforge/utf8.hpp"

namespace docforge::prompt {

namespace {

bool is_boundary(std::string_view text, std::size_t pos) {
  return text.substr(pos, kBlockMarker.size()) == kBlockMarker && (pos == 0 || text[pos - 1] == '\n');
}

std::string cut_chars(std::string_view text, std::size_t max_chars) {
  return std::string(text.substr(0, utf8::byte_offset(text, max_chars)));
}

std::string level1_text(std::string_view ip1, std::string_view op1, std::string_view ip2,
                        std::string_view op2, std::string_view context) {
  std::string text(kLevel1Instruction);
  text += kInputLabel;
  text += ip1;
  text += kOutputLabel;
  text += op1;
  text += kInputLabel;
  text += ip2;
  text += kOutputLabel;
  text += op2;
  text += kInputLabel;
  text += context;
  text += kFinalOutputLabel;
  return text;
}

std::string level2_text(std::string_view exemplar_input, std::string_view exemplar_output,
                        std::string_view context) {
  std::string text(kLevel2Instruction);
  text += kInputLabel;
  text += exemplar_input;
  text += kOutputLabel;
  text += exemplar_output;
  text += kInputLabel;
  text += context;
  text += kFinalOutputLabel;
  return text;
}

std::string repair_suffix() { return "\n" + std::string(kRepairInstruction); }

std::uint64_t seed_of(std::string_view key) { return fingerprint64(key); }

}  // namespace

FitResult fit_to_budget(std::string_view context, std::size_t budget_chars, std::size_t overhead_chars,
                        Retention retention) {
  if (budget_chars <= overhead_chars) {
    throw InvalidArgument("prompt", "budget of " + std::to_string(budget_chars) +
                                        " characters leaves no room after " +
                                        std::to_string(overhead_chars) + " characters of overhead");
  }
  const std::size_t limit = budget_chars - overhead_chars;
  const std::size_t total = utf8::length(context);
  if (total <= limit) return {std::string(context), false};

  if (retention == Retention::head) {
    std::size_t cut = utf8::byte_offset(context, limit);
    // Last block start in (0, cut].
    for (std::size_t p = cut; p > 0; --p) {
      if (is_boundary(context, p)) return {std::string(context.substr(0, p)), true};
    }
    return {std::string(context.substr(0, cut)), true};
  }

  std::size_t start = utf8::byte_offset(context, total - limit);
  for (std::size_t p = start; p < context.size(); ++p) {
    if (is_boundary(context, p)) return {std::string(context.substr(p)), true};
  }
  return {std::string(context.substr(start)), true};
}

std::uint64_t default_shot_seed(const RepositoryRef& target, DocumentationType type,
                                DocumentationSource source) {
  return seed_of(target.display() + "|" + std::string(to_string(type)) + "|" +
                 std::string(to_string(source)));
}

std::uint64_t default_exemplar_seed(const RepositoryRef& target, DocumentationType type) {
  return seed_of(target.display() + "|" + std::string(to_string(type)) + "|final");
}

ShotPairs select_level1_shots(DocumentationType type, DocumentationSource source,
                              const RepositoryRef& target, const GroundtruthStore& store,
                              std::optional<std::uint64_t> seed) {
  std::vector<const GroundtruthSet*> donors;
  std::string missing;
  for (const auto& set : store.sets()) {
    if (set.repo == target) continue;
    const bool has_doc = set.intermediate(type, source) != nullptr;
    const bool has_input = set.input(source) != nullptr;
    if (has_doc && has_input) {
      donors.push_back(&set);
      continue;
    }
    missing += "\n  " + set.repo.display() + ": missing";
    if (!has_doc) missing += " " + intermediate_file_name(type, source);
    if (!has_input) missing += " inputs/" + input_file_name(source);
  }
  if (donors.size() < 2) {
    throw TerminalError("prompt", "need two donor repositories other than " + target.display() +
                                      " with " + std::string(to_string(type)) + "/" +
                                      std::string(to_string(source)) + " groundtruth; found " +
                                      std::to_string(donors.size()) + missing);
  }
  std::mt19937_64 rng(seed.value_or(default_shot_seed(target, type, source)));
  const auto n = donors.size();
  std::size_t first = rng() % n;
  std::size_t second = rng() % (n - 1);
  if (second >= first) ++second;

  auto shot = [&](const GroundtruthSet* set) {
    return ShotPair{*set->input(source), *set->intermediate(type, source), set->repo};
  };
  return {shot(donors[first]), shot(donors[second])};
}

ConsolidationExemplar select_level2_exemplar(DocumentationType type, const RepositoryRef& target,
                                             const GroundtruthStore& store,
                                             std::optional<std::uint64_t> seed) {
  std::vector<const GroundtruthSet*> donors;
  for (const auto& set : store.sets()) {
    if (set.repo == target || !set.final_doc(type)) continue;
    bool all = true;
    for (auto source : kAllDocumentationSources) all = all && set.intermediate(type, source);
    if (all) donors.push_back(&set);
  }
  if (donors.empty()) {
    throw TerminalError("prompt", "no donor repository other than " + target.display() +
                                      " has all five " + std::string(to_string(type)) +
                                      " intermediates and " + final_file_name(type));
  }
  std::mt19937_64 rng(seed.value_or(default_exemplar_seed(target, type)));
  const auto* set = donors[rng() % donors.size()];
  ConsolidationExemplar exemplar{{}, *set->final_doc(type), set->repo};
  for (auto source : kAllDocumentationSources) {
    exemplar.intermediates.emplace(source, *set->intermediate(type, source));
  }
  return exemplar;
}

std::size_t repair_reserve_chars() noexcept { return utf8::length(repair_suffix()); }

PromptText make_prompt(std::string text, bool truncated_context, std::size_t budget_chars) {
  PromptText p;
  p.char_count = utf8::length(text);
  if (p.char_count > budget_chars) {
    throw TerminalError("prompt", "prompt of " + std::to_string(p.char_count) +
                                      " characters exceeds the budget of " +
                                      std::to_string(budget_chars));
  }
  p.fingerprint = fingerprint_hex(text);
  p.text = std::move(text);
  p.truncated_context = truncated_context;
  return p;
}

PromptText build_level1_prompt(const ShotPairs& shots, std::string_view context_input,
                               DocumentationType type, const PromptConfig& cfg) {
  for (const auto* shot : {&shots.first, &shots.second}) {
    if (shot->output_doc.doc_type != type) {
      throw InvalidArgument("prompt", "shot from " + shot->origin_repo.display() + " is a " +
                                          std::string(to_string(shot->output_doc.doc_type)) +
                                          " doc, expected " + std::string(to_string(type)));
    }
    auto result = validate_schema(shot->output_doc);
    if (!result.ok()) {
      throw InvalidArgument("prompt", "invalid shot from " + shot->origin_repo.display() + ": " +
                                          result.summary());
    }
  }
  auto ip1 = fit_to_budget(shots.first.input_text, cfg.shot_input_cap_chars + 1, 1, cfg.retention).text;
  auto ip2 = fit_to_budget(shots.second.input_text, cfg.shot_input_cap_chars + 1, 1, cfg.retention).text;
  auto op1 = exemplar_json(shots.first.output_doc);
  auto op2 = exemplar_json(shots.second.output_doc);

  const auto overhead = utf8::length(level1_text(ip1, op1, ip2, op2, "")) + repair_reserve_chars();
  if (overhead >= cfg.budget_chars) {
    throw TerminalError("prompt", "shots alone need " + std::to_string(overhead) +
                                      " characters, over the budget of " +
                                      std::to_string(cfg.budget_chars));
  }
  auto fitted = fit_to_budget(context_input, cfg.budget_chars, overhead, cfg.retention);
  return make_prompt(level1_text(ip1, op1, ip2, op2, fitted.text), fitted.truncated,
                     cfg.budget_chars);
}

std::string render_intermediates(const std::map<DocumentationSource, StructuredDoc>& intermediates,
                                 std::optional<std::size_t> section_cap, bool* truncated) {
  std::string out;
  for (auto source : kAllDocumentationSources) {
    auto it = intermediates.find(source);
    if (it == intermediates.end()) {
      throw TerminalError("prompt", "missing intermediate output for source " +
                                        std::string(to_string(source)));
    }
    std::string section = std::string(kBlockMarker) + "intermediate " +
                          std::string(to_string(source)) + "\n" + exemplar_json(it->second) + "\n\n";
    if (section_cap && utf8::length(section) > *section_cap) {
      section = cut_chars(section, *section_cap);
      if (truncated) *truncated = true;
    }
    out += section;
  }
  return out;
}

PromptText build_level2_prompt(const ConsolidationExemplar& exemplar,
                               const std::map<DocumentationSource, StructuredDoc>& intermediates,
                               DocumentationType type, const PromptConfig& cfg) {
  for (const auto& [source, doc] : intermediates) {
    if (doc.doc_type != type) {
      throw InvalidArgument("prompt", "intermediate for " + std::string(to_string(source)) +
                                          " is not a " + std::string(to_string(type)) + " doc");
    }
  }
  if (exemplar.final_doc.doc_type != type) {
    throw InvalidArgument("prompt", "consolidation exemplar is not a " + std::string(to_string(type)) + " doc");
  }
  // Validate presence before any budget arithmetic so the error names the source.
  render_intermediates(intermediates, std::nullopt);

  auto exemplar_input = render_intermediates(exemplar.intermediates,
                                             cfg.shot_input_cap_chars / kAllDocumentationSources.size());
  auto exemplar_output = exemplar_json(exemplar.final_doc);
  const auto overhead =
      utf8::length(level2_text(exemplar_input, exemplar_output, "")) + repair_reserve_chars();
  if (overhead >= cfg.budget_chars) {
    throw TerminalError("prompt", "consolidation exemplar alone needs " + std::to_string(overhead) +
                                      " characters, over the budget of " +
                                      std::to_string(cfg.budget_chars));
  }
  const std::size_t available = cfg.budget_chars - overhead;
  auto context = render_intermediates(intermediates, std::nullopt);
  bool truncated = false;
  if (utf8::length(context) > available) {
    context = render_intermediates(intermediates, available / kAllDocumentationSources.size(), &truncated);
  }
  return make_prompt(level2_text(exemplar_input, exemplar_output, context), truncated, cfg.budget_chars);
}

PromptText with_repair_instruction(const PromptText& prompt, const PromptConfig& cfg) {
  return make_prompt(prompt.text + repair_suffix(), prompt.truncated_context, cfg.budget_chars);
}

}  // namespace docforge::prompt
