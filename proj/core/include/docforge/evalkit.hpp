#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "docforge/groundtruth.hpp"
#include "docforge/model.hpp"

namespace docforge::eval {

using Tokens = std::vector<std::string>;

/// Lowercases (ASCII), splits on Unicode whitespace, drops the JSON
/// structural characters { } [ ] " and splits leading/trailing ASCII
/// punctuation into one token per character. Bare ":" tokens are dropped;
/// other punctuation tokens (",", ".") are kept.
Tokens tokenize(std::string_view text);

/// Sentence BLEU: modified 1..4-gram precisions (orders limited to the
/// hypothesis length), add-one smoothing on each, geometric mean, and
/// brevity penalty exp(1 - |ref|/|hyp|) for short hypotheses. 0 for an
/// empty hypothesis.
double bleu4(const Tokens& hypothesis, const Tokens& reference);

std::size_t lcs_length(const Tokens& a, const Tokens& b);

struct RougeL {
  std::size_t lcs = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

RougeL rouge_l(const Tokens& hypothesis, const Tokens& reference);

/// Metrics over the canonical text of both docs.
EvalScores score_docs(const StructuredDoc& generated, const StructuredDoc& groundtruth);

struct ScoreMatrix {
  std::map<TypeSourceKey, EvalScores> per_pair;
  std::map<DocumentationType, EvalScores> per_type_final;
  double bleu4_mean = 0.0;
  double rouge_f_mean = 0.0;
  /// Counterparts that were missing and therefore not scored.
  std::vector<std::string> coverage_notes;

  /// Means over every populated cell of both maps.
  void recompute_averages();
  bool empty() const noexcept { return per_pair.empty() && per_type_final.empty(); }
};

/// Scores every (repo, type, source) and (repo, type, final) present on
/// both sides and averages each cell across repositories. The generated
/// root may use the pipeline output layout or the groundtruth layout.
/// Throws TerminalError when no pair matches.
ScoreMatrix evaluate_corpus(const std::filesystem::path& generated_root,
                            const std::filesystem::path& groundtruth_root);

struct SampleSpec {
  std::uint64_t population = 0;
  double confidence = 0.95;
  double margin = 0.05;
  double proportion = 0.5;

  void validate() const;
};

/// Cochran's sample size with finite population correction, rounded up.
std::uint64_t sample_size(const SampleSpec& spec);

enum class ReportFormat { markdown, csv };

/// Three tables: ROUGE-L per (type, source), BLEU-4 per (type, source) as
/// percentages, and per-type consolidated scores. Markdown bolds each row's
/// maximum and renders missing cells as an em dash.
std::string render_report(const ScoreMatrix& matrix, ReportFormat format);

}  // namespace docforge::eval
