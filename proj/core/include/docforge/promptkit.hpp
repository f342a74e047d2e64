#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "docforge/groundtruth.hpp"
#include "docforge/model.hpp"

namespace docforge::prompt {

/// One exemplar: extracted source text and the curated doc for it.
struct ShotPair {
  std::string input_text;
  StructuredDoc output_doc;
  RepositoryRef origin_repo;
};

using ShotPairs = std::pair<ShotPair, ShotPair>;

/// The one-shot exemplar of the consolidation prompt: a donor repository's
/// five curated intermediates and its curated final doc.
struct ConsolidationExemplar {
  std::map<DocumentationSource, StructuredDoc> intermediates;
  StructuredDoc final_doc;
  RepositoryRef origin_repo;
};

struct PromptText {
  std::string text;
  std::size_t char_count = 0;
  std::string fingerprint;
  bool truncated_context = false;
};

/// Which end of an oversized context survives truncation.
enum class Retention { head, tail };

inline constexpr std::size_t kDefaultContextBudget = 37000;

struct PromptConfig {
  std::size_t budget_chars = kDefaultContextBudget;
  Retention retention = Retention::head;
  /// Each shot input is fitted to this many characters before it is placed
  /// in a prompt. Shot outputs are never cut.
  std::size_t shot_input_cap_chars = 6000;
};

inline constexpr std::string_view kLevel1Instruction =
    "Learn the analogy between the following input and output examples and generate the output "
    "for the new input in the same json format.";

inline constexpr std::string_view kLevel2Instruction =
    "Learn the analogy between the following input and output example and generate the output "
    "for the new input in the same json format, consolidating the information in intermediate "
    "outputs given as input.";

inline constexpr std::string_view kRepairInstruction =
    "Return only valid json matching the previous output format.";

/// Marker starting each record block in bundle text and each intermediate
/// section in consolidation prompts.
inline constexpr std::string_view kBlockMarker = "### ";
inline constexpr std::string_view kInputLabel = "\nInput: ";
inline constexpr std::string_view kOutputLabel = "\nOutput: ";
inline constexpr std::string_view kFinalOutputLabel = "\nOutput:";

struct FitResult {
  std::string text;
  bool truncated = false;
};

/// Shrinks `context` to at most budget_chars - overhead_chars characters.
/// A cut lands on the last "### " block boundary that fits (first one, for
/// tail retention) and falls back to a raw character cut otherwise.
/// Throws InvalidArgument when budget_chars <= overhead_chars.
FitResult fit_to_budget(std::string_view context, std::size_t budget_chars,
                        std::size_t overhead_chars, Retention retention = Retention::head);

std::uint64_t default_shot_seed(const RepositoryRef& target, DocumentationType type,
                                DocumentationSource source);
std::uint64_t default_exemplar_seed(const RepositoryRef& target, DocumentationType type);

/// Two shots from two distinct donor repositories, neither of them the
/// target. Deterministic for a given seed. Throws TerminalError listing
/// missing material when fewer than two donors are eligible.
ShotPairs select_level1_shots(DocumentationType type, DocumentationSource source,
                              const RepositoryRef& target, const GroundtruthStore& store,
                              std::optional<std::uint64_t> seed = std::nullopt);

/// One donor repository other than the target with all five intermediates
/// and the final doc of `type`.
ConsolidationExemplar select_level2_exemplar(DocumentationType type, const RepositoryRef& target,
                                             const GroundtruthStore& store,
                                             std::optional<std::uint64_t> seed = std::nullopt);

/// Characters reserved in every prompt so the repair variant still fits.
std::size_t repair_reserve_chars() noexcept;

PromptText build_level1_prompt(const ShotPairs& shots, std::string_view context_input,
                               DocumentationType type, const PromptConfig& cfg = {});

/// The five intermediates rendered as consolidation context, each section
/// capped at `section_cap` characters (no cap when nullopt).
std::string render_intermediates(const std::map<DocumentationSource, StructuredDoc>& intermediates,
                                 std::optional<std::size_t> section_cap, bool* truncated = nullptr);

PromptText build_level2_prompt(const ConsolidationExemplar& exemplar,
                               const std::map<DocumentationSource, StructuredDoc>& intermediates,
                               DocumentationType type, const PromptConfig& cfg = {});

/// The prompt re-issued after an unusable completion.
PromptText with_repair_instruction(const PromptText& prompt, const PromptConfig& cfg = {});

/// Wraps finished text; throws TerminalError if it exceeds the budget.
PromptText make_prompt(std::string text, bool truncated_context, std::size_t budget_chars);

}  // namespace docforge::prompt
