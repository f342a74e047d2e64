#include <cstdio>
#include <optional>
#include <sstream>

#include "docforge/evalkit.hpp"

namespace docforge::eval {

namespace {

constexpr std::string_view kMissing = "-";

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string rouge_cell(double v) { return fixed2(v); }
std::string bleu_cell(double v) { return fixed2(v * 100.0) + "%"; }

struct Cell {
  std::optional<double> value;
  std::string (*format)(double);
};

struct Table {
  std::string id;
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::pair<std::string, std::vector<Cell>>> rows;
};

std::vector<Table> build_tables(const ScoreMatrix& m) {
  std::vector<std::string> source_columns;
  for (auto s : kAllDocumentationSources) source_columns.emplace_back(display_label(s));

  Table rouge{"rouge_l", "ROUGE-L per documentation type and source", source_columns, {}};
  Table bleu{"bleu4", "BLEU-4 per documentation type and source", source_columns, {}};
  Table final{"final", "Consolidated documentation per type", {"ROUGE-L", "BLEU-4"}, {}};

  for (auto t : kAllDocumentationTypes) {
    std::string label(display_label(t));
    std::vector<Cell> r, b;
    for (auto s : kAllDocumentationSources) {
      auto it = m.per_pair.find({t, s});
      if (it == m.per_pair.end()) {
        r.push_back({std::nullopt, rouge_cell});
        b.push_back({std::nullopt, bleu_cell});
      } else {
        r.push_back({it->second.rouge_f, rouge_cell});
        b.push_back({it->second.bleu4, bleu_cell});
      }
    }
    rouge.rows.emplace_back(label, std::move(r));
    bleu.rows.emplace_back(label, std::move(b));

    auto f = m.per_type_final.find(t);
    if (f == m.per_type_final.end()) {
      final.rows.emplace_back(label, std::vector<Cell>{{std::nullopt, rouge_cell}, {std::nullopt, bleu_cell}});
    } else {
      final.rows.emplace_back(label, std::vector<Cell>{{f->second.rouge_f, rouge_cell}, {f->second.bleu4, bleu_cell}});
    }
  }
  return {std::move(rouge), std::move(bleu), std::move(final)};
}

std::string render_markdown(const ScoreMatrix& m) {
  std::ostringstream out;
  bool first = true;
  for (const auto& table : build_tables(m)) {
    if (!first) out << "\n";
    first = false;
    out << "## " << table.title << "\n\n|  |";
    for (const auto& c : table.columns) out << " " << c << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << "---|";
    out << "\n";
    for (const auto& [label, cells] : table.rows) {
      std::optional<double> best;
      for (const auto& c : cells) {
        if (c.value && (!best || *c.value > *best)) best = c.value;
      }
      out << "| " << label << " |";
      for (const auto& c : cells) {
        if (!c.value) {
          out << " " << kMissing << " |";
          continue;
        }
        auto text = c.format(*c.value);
        // Ties are all bolded.
        if (*c.value == *best) text = "**" + text + "**";
        out << " " << text << " |";
      }
      out << "\n";
    }
  }
  out << "\nMean BLEU-4: " << bleu_cell(m.bleu4_mean) << "\nMean ROUGE-L: " << rouge_cell(m.rouge_f_mean)
      << "\n";
  if (!m.coverage_notes.empty()) {
    out << "\nNot scored:\n";
    for (const auto& note : m.coverage_notes) out << "- " << note << "\n";
  }
  return out.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::string render_csv(const ScoreMatrix& m) {
  std::ostringstream out;
  out << "table,row,column,value\n";
  for (const auto& table : build_tables(m)) {
    for (const auto& [label, cells] : table.rows) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!cells[i].value) continue;
        out << table.id << "," << csv_field(label) << "," << csv_field(table.columns[i]) << ","
            << fixed4(*cells[i].value) << "\n";
      }
    }
  }
  return out.str();
}

}  // namespace

std::string render_report(const ScoreMatrix& matrix, ReportFormat format) {
  return format == ReportFormat::csv ? render_csv(matrix) : render_markdown(matrix);
}

}  // namespace docforge::eval
