#include "docforge/comments.hpp"

#include <algorithm>
#include <optional>

#include "docforge/error.hpp"

namespace docforge {

namespace {

bool starts_with(std::string_view text, std::size_t pos, std::string_view marker) noexcept {
  return text.substr(pos, marker.size()) == marker;
}

void check_prefix_free(const std::vector<std::string>& markers, std::string_view list) {
  for (std::size_t i = 0; i < markers.size(); ++i) {
    if (markers[i].empty()) {
      throw InvalidArgument("comments", "empty marker in " + std::string(list));
    }
    for (std::size_t j = 0; j < markers.size(); ++j) {
      if (i != j && markers[j].rfind(markers[i], 0) == 0) {
        throw InvalidArgument("comments", "marker '" + markers[i] + "' is a prefix of '" +
                                              markers[j] + "' in " + std::string(list));
      }
    }
  }
}

std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string_view trim_right(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (true) {
    auto nl = s.find('\n', start);
    lines.emplace_back(trim_right(s.substr(start, nl == std::string_view::npos ? nl : nl - start)));
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return lines;
}

std::size_t leading_ws(std::string_view s) {
  std::size_t n = 0;
  while (n < s.size() && (s[n] == ' ' || s[n] == '\t')) ++n;
  return n;
}

// Removes decoration from a block comment body: leading '*' on the first
// line, a '*' gutter on continuation lines, common indentation, and
// surrounding blank space.
std::string clean_block(std::string_view content) {
  auto lines = split_lines(content);
  {
    auto& first = lines.front();
    std::size_t n = 0;
    while (n < first.size() && first[n] == '*') ++n;
    first.erase(0, n);
  }
  bool gutter = lines.size() > 1;
  for (std::size_t i = 1; i < lines.size() && gutter; ++i) {
    auto ws = leading_ws(lines[i]);
    if (ws < lines[i].size() && lines[i][ws] != '*') gutter = false;
  }
  if (gutter) {
    for (std::size_t i = 1; i < lines.size(); ++i) {
      auto ws = leading_ws(lines[i]);
      if (ws >= lines[i].size()) continue;
      std::size_t cut = ws + 1;
      if (cut < lines[i].size() && lines[i][cut] == ' ') ++cut;
      lines[i].erase(0, cut);
    }
  }
  std::size_t indent = std::string::npos;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto ws = leading_ws(lines[i]);
    if (ws < lines[i].size()) indent = std::min(indent, ws);
  }
  if (indent != std::string::npos) {
    for (std::size_t i = 1; i < lines.size(); ++i) {
      lines[i].erase(0, std::min(indent, lines[i].size()));
    }
  }
  std::string joined;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) joined += '\n';
    joined += lines[i];
  }
  std::string_view out = trim(joined);
  while (!out.empty() && out.back() == '*') out.remove_suffix(1);
  return std::string(trim(out));
}

enum class MarkerKind { block, line, string };

struct Match {
  MarkerKind kind;
  std::size_t index;
  std::size_t length;
};

std::optional<Match> match_at(std::string_view text, std::size_t pos, const CommentGrammar& g) {
  std::optional<Match> best;
  auto consider = [&](MarkerKind kind, std::size_t index, std::string_view marker) {
    if (!starts_with(text, pos, marker)) return;
    // Candidates are visited block, line, string, so a strictly longer
    // marker is needed to displace an earlier kind.
    if (!best || marker.size() > best->length) best = Match{kind, index, marker.size()};
  };
  for (std::size_t i = 0; i < g.block_pairs.size(); ++i) consider(MarkerKind::block, i, g.block_pairs[i].first);
  for (std::size_t i = 0; i < g.line_markers.size(); ++i) consider(MarkerKind::line, i, g.line_markers[i]);
  for (std::size_t i = 0; i < g.string_delimiters.size(); ++i) consider(MarkerKind::string, i, g.string_delimiters[i]);
  return best;
}

}  // namespace

void CommentGrammar::validate() const {
  check_prefix_free(line_markers, "line markers");
  check_prefix_free(string_delimiters, "string delimiters");
  std::vector<std::string> opens;
  for (const auto& [open, close] : block_pairs) {
    if (open.empty() || close.empty()) {
      throw InvalidArgument("comments", "block comment pair with an empty marker");
    }
    opens.push_back(open);
  }
  check_prefix_free(opens, "block comment openers");
}

const CommentGrammar& builtin_grammar(std::string_view id) {
  static const CommentGrammar c{{"//"}, {{"/*", "*/"}}, {"\"", "'"}};
  static const CommentGrammar script{{"#"}, {}, {"\"", "'"}};
  static const CommentGrammar docstring{{"#"}, {{"\"\"\"", "\"\"\""}, {"'''", "'''"}}, {"\"", "'"}};
  if (id == "c") return c;
  if (id == "script") return script;
  if (id == "docstring") return docstring;
  throw InvalidArgument("comments", "unknown comment grammar '" + std::string(id) + "'");
}

bool has_builtin_grammar(std::string_view id) noexcept {
  return id == "c" || id == "script" || id == "docstring";
}

const std::map<std::string, std::string>& default_comment_languages() {
  static const std::map<std::string, std::string> languages = {
      {".c", "c"},        {".h", "c"},         {".cc", "c"},      {".cpp", "c"},
      {".cxx", "c"},      {".hpp", "c"},       {".hh", "c"},      {".hxx", "c"},
      {".java", "c"},     {".js", "c"},        {".jsx", "c"},     {".ts", "c"},
      {".tsx", "c"},      {".go", "c"},        {".rs", "c"},      {".cs", "c"},
      {".kt", "c"},       {".scala", "c"},     {".swift", "c"},   {".m", "c"},
      {".php", "c"},      {".dart", "c"},      {".sh", "script"}, {".bash", "script"},
      {".rb", "script"},  {".pl", "script"},   {".r", "script"},  {".yaml", "script"},
      {".yml", "script"}, {".toml", "script"}, {".cmake", "script"},
      {".py", "docstring"},
  };
  return languages;
}

std::vector<std::string> CommentExtraction::texts() const {
  std::vector<std::string> out;
  out.reserve(comments.size());
  for (const auto& c : comments) out.push_back(c.text);
  return out;
}

CommentExtraction extract_comments(std::string_view text, const CommentGrammar& grammar) {
  CommentExtraction result;

  std::size_t line = 1;
  std::size_t line_start = 0;
  // Line-comment run being accumulated.
  std::vector<std::string> run;
  std::size_t run_first_line = 0;
  std::size_t run_last_line = 0;
  // A run started by a comment trailing code does not absorb later lines.
  bool run_extendable = false;

  auto flush_run = [&] {
    if (run.empty()) return;
    std::string joined;
    for (std::size_t i = 0; i < run.size(); ++i) {
      if (i) joined += '\n';
      joined += run[i];
    }
    auto body = trim(joined);
    if (!body.empty()) result.comments.push_back({std::string(body), run_first_line, false});
    run.clear();
  };
  auto advance_to = [&](std::size_t& pos, std::size_t target) {
    for (; pos < target; ++pos) {
      if (text[pos] == '\n') {
        ++line;
        line_start = pos + 1;
      }
    }
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    auto match = match_at(text, pos, grammar);
    if (!match) {
      advance_to(pos, pos + 1);
      continue;
    }
    switch (match->kind) {
      case MarkerKind::line: {
        bool comment_only = leading_ws(text.substr(line_start, pos - line_start)) == pos - line_start;
        if (!(comment_only && run_extendable && !run.empty() && run_last_line + 1 == line)) {
          flush_run();
          run_first_line = line;
          run_extendable = comment_only;
        }
        auto begin = pos + match->length;
        auto end = text.find('\n', begin);
        if (end == std::string_view::npos) end = text.size();
        run.emplace_back(trim(text.substr(begin, end - begin)));
        run_last_line = line;
        advance_to(pos, end);
        break;
      }
      case MarkerKind::block: {
        flush_run();
        const auto& [open, close] = grammar.block_pairs[match->index];
        auto start_line = line;
        auto begin = pos + open.size();
        auto end = text.find(close, begin);
        bool unterminated = end == std::string_view::npos;
        if (unterminated) {
          end = text.size();
          result.warnings.push_back("unterminated block comment starting at line " +
                                    std::to_string(start_line));
        }
        auto body = clean_block(text.substr(begin, end - begin));
        if (!body.empty() || unterminated) {
          result.comments.push_back({std::move(body), start_line, unterminated});
        }
        advance_to(pos, unterminated ? end : end + close.size());
        break;
      }
      case MarkerKind::string: {
        const auto& delim = grammar.string_delimiters[match->index];
        std::size_t i = pos + delim.size();
        while (i < text.size()) {
          if (text[i] == '\\') {
            // Escapes, including a backslash-newline continuation.
            i += 2;
            continue;
          }
          if (starts_with(text, i, delim)) {
            i += delim.size();
            break;
          }
          if (delim.size() == 1 && text[i] == '\n') break;
          ++i;
        }
        advance_to(pos, std::min(i, text.size()));
        break;
      }
    }
  }
  flush_run();
  return result;
}

}  // namespace docforge
