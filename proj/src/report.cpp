#include "rstkit/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace rstkit {

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size())
    throw Error(ErrorKind::DimensionMismatch, "table row has " + std::to_string(row.size()) + " cells, header has " +
                                                  std::to_string(header_.size()));
  rows_.push_back(std::move(row));
}

std::string Table::text() const {
  std::vector<std::size_t> width(header_.size());
  for (std::size_t c = 0; c < header_.size(); ++c) {
    width[c] = header_[c].size();
    for (const auto& r : rows_) width[c] = std::max(width[c], r[c].size());
  }
  std::ostringstream out;
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      // First column left aligned, numbers right aligned.
      const std::string pad(width[c] - cells[c].size(), ' ');
      if (c > 0) out << "  ";
      if (c == 0) {
        out << cells[c] << (cells.size() > 1 ? pad : "");
      } else {
        out << pad << cells[c];
      }
    }
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out.str();
}

std::string Table::csv() const {
  std::ostringstream out;
  const auto cell = [&](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
      out << s;
      return;
    }
    out << '"';
    for (char ch : s) out << (ch == '"' ? "\"\"" : std::string(1, ch));
    out << '"';
  };
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) out << ',';
      cell(cells[c]);
    }
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out.str();
}

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string percent(double value) { return fixed(value, 1); }

Table stats_table(const std::map<std::string, CorpusStats>& rows) {
  Table t({"corpus", "genres", "docs", "classes", "tok_min", "tok_max", "tok_median", "spanned_pct",
           "spanned_all_pct", "edus", "edus_per_tree", "relation_pairs", "labelled_constituents"});
  for (const auto& [name, s] : rows) {
    t.add_row({name, std::to_string(s.genres), std::to_string(s.docs), std::to_string(s.classes),
               std::to_string(s.tokens_min), std::to_string(s.tokens_max), fixed(s.tokens_median, 1),
               s.spanned ? percent(s.spanned->non_elementary_percent()) : "-",
               s.spanned ? percent(s.spanned->overall_percent()) : "-", std::to_string(s.edus),
               fixed(s.edus_per_tree, 1), std::to_string(s.relation_pairs), std::to_string(s.labelled_constituents)});
  }
  return t;
}

Table parseval_table(const std::map<std::string, ParsevalScores>& rows, std::span<const Metric> metrics,
                     const std::map<std::string, SegScores>* segmentation) {
  std::vector<std::string> header{"group"};
  if (segmentation) header.insert(header.end(), {"Segm_P", "Segm_R", "Segm_F1"});
  for (Metric m : metrics) {
    const std::string n(to_string(m));
    header.insert(header.end(), {n + "_P", n + "_R", n + "_F1"});
  }
  Table t(header);
  for (const auto& [name, s] : rows) {
    std::vector<std::string> row{name};
    if (segmentation) {
      const auto it = segmentation->find(name);
      const Counts c = it == segmentation->end() ? Counts{} : it->second.boundaries;
      row.insert(row.end(), {percent(c.precision()), percent(c.recall()), percent(c.f1())});
    }
    for (Metric m : metrics) {
      const Counts& c = s[m];
      row.insert(row.end(), {percent(c.precision()), percent(c.recall()), percent(c.f1())});
    }
    t.add_row(std::move(row));
  }
  return t;
}

}  // namespace rstkit
