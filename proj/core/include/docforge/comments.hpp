#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace docforge {

/// Lexical description of how one language family writes comments.
///
/// Within each list no marker may be a prefix of another, and no two block
/// pairs may share an opening marker. When markers from different lists
/// start at the same position the longest one wins; on equal length block
/// comments beat line comments, which beat string literals.
struct CommentGrammar {
  std::vector<std::string> line_markers;
  std::vector<std::pair<std::string, std::string>> block_pairs;
  std::vector<std::string> string_delimiters;

  /// Throws InvalidArgument describing the first broken invariant.
  void validate() const;
};

/// Built-in grammars, by id: "c" (// and /* */), "script" (#), and
/// "docstring" (# plus triple-quoted blocks).
const CommentGrammar& builtin_grammar(std::string_view id);
bool has_builtin_grammar(std::string_view id) noexcept;

/// Default map from file suffix (".cpp", ".py", ...) to grammar id.
const std::map<std::string, std::string>& default_comment_languages();

struct ExtractedComment {
  std::string text;
  std::size_t line = 0;  // 1-based line of the opening marker
  bool unterminated = false;
};

struct CommentExtraction {
  std::vector<ExtractedComment> comments;
  std::vector<std::string> warnings;

  std::vector<std::string> texts() const;
};

/// Returns the comments of `file_body` in document order. Markers inside
/// string literals are ignored; consecutive line comments with nothing but
/// whitespace before the marker merge into one comment; block comments are
/// returned without their delimiters. An unterminated block comment runs to
/// the end of the input and produces a warning.
///
/// String literals opened by a single-character delimiter end at the end of
/// the line; longer delimiters (triple quotes) may span lines.
CommentExtraction extract_comments(std::string_view file_body, const CommentGrammar& grammar);

}  // namespace docforge
