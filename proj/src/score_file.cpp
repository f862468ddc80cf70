#include "rstkit/score_file.hpp"

#include <iomanip>
#include <sstream>

#include "rstkit/tokenize.hpp"
#include "rstkit/treebank_io.hpp"

namespace rstkit {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::ParseError, "score file line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> fields(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string f; in >> f;) out.push_back(std::move(f));
  return out;
}

std::size_t to_index(const std::string& s, std::size_t line) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    fail(line, "bad index '" + s + "'");
  }
  if (pos != s.size()) fail(line, "bad index '" + s + "'");
  return static_cast<std::size_t>(v);
}

Eigen::VectorXd to_vector(const std::vector<std::string>& f, std::size_t from, std::size_t line) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(f.size() - from));
  for (std::size_t i = from; i < f.size(); ++i) {
    std::size_t pos = 0;
    double x = 0;
    try {
      x = std::stod(f[i], &pos);
    } catch (const std::exception&) {
      fail(line, "bad score '" + f[i] + "'");
    }
    if (pos != f[i].size() || !std::isfinite(x)) fail(line, "bad score '" + f[i] + "'");
    v(static_cast<Eigen::Index>(i - from)) = x;
  }
  return v;
}

}  // namespace

ScoreTable parse_score_file(std::string_view text) {
  ScoreTable table;
  std::istringstream in{std::string(strip_bom(text))};
  std::string line;
  std::size_t line_no = 0;
  bool have_labels = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("#rstkit-scores")) {
      if (line != "#rstkit-scores 1") fail(line_no, "unsupported version");
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    const auto f = fields(line);
    if (f.empty()) continue;
    if (f[0] == "labels") {
      table.labels = LabelInventory({f.begin() + 1, f.end()});
      have_labels = true;
    } else if (f[0] == "split") {
      if (f.size() < 4) fail(line_no, "split line needs doc, begin, end");
      const EduRange r{to_index(f[2], line_no), to_index(f[3], line_no)};
      if (r.end < r.begin + 2) fail(line_no, "split range must span at least two EDUs");
      auto v = to_vector(f, 4, line_no);
      if (static_cast<std::size_t>(v.size()) != r.size() - 1)
        throw Error(ErrorKind::ProviderLengthMismatch,
                    "score file line " + std::to_string(line_no) + ": expected " + std::to_string(r.size() - 1) +
                        " split scores, found " + std::to_string(v.size()));
      table.documents[f[1]].splits[r] = std::move(v);
    } else if (f[0] == "label") {
      if (!have_labels) fail(line_no, "label scores before the labels line");
      if (f.size() < 5) fail(line_no, "label line needs doc, begin, mid, end");
      const auto b = to_index(f[2], line_no);
      const auto m = to_index(f[3], line_no);
      const auto e = to_index(f[4], line_no);
      if (!(b < m && m < e)) fail(line_no, "label ranges must be non-empty and adjacent");
      auto v = to_vector(f, 5, line_no);
      if (static_cast<std::size_t>(v.size()) != table.labels.size())
        throw Error(ErrorKind::ProviderLengthMismatch,
                    "score file line " + std::to_string(line_no) + ": expected " +
                        std::to_string(table.labels.size()) + " label scores, found " + std::to_string(v.size()));
      table.documents[f[1]].labels[{b, m, e}] = std::move(v);
    } else {
      fail(line_no, "unknown record '" + f[0] + "'");
    }
  }
  if (!have_labels) throw Error(ErrorKind::ParseError, "score file has no labels line");
  return table;
}

ScoreTable load_score_file(const std::string& path) { return parse_score_file(read_file(path)); }

std::string format_score_file(const ScoreTable& table) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "#rstkit-scores 1\nlabels";
  for (const auto& name : table.labels.names()) out << ' ' << name;
  out << '\n';
  for (const auto& [doc, scores] : table.documents) {
    for (const auto& [r, v] : scores.splits) {
      out << "split " << doc << ' ' << r.begin << ' ' << r.end;
      for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << v(i);
      out << '\n';
    }
    for (const auto& [key, v] : scores.labels) {
      out << "label " << doc << ' ' << std::get<0>(key) << ' ' << std::get<1>(key) << ' ' << std::get<2>(key);
      for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << v(i);
      out << '\n';
    }
  }
  return out.str();
}

TableScoreProvider::TableScoreProvider(const ScoreTable& table, const std::string& doc_id) : doc_id_(doc_id) {
  auto it = table.documents.find(doc_id);
  if (it == table.documents.end()) throw Error(ErrorKind::MissingScore, "no scores for document '" + doc_id + "'");
  scores_ = &it->second;
}

Eigen::VectorXd TableScoreProvider::split_scores(EduRange range) const {
  auto it = scores_->splits.find(range);
  if (it == scores_->splits.end())
    throw Error(ErrorKind::MissingScore, doc_id_ + ": no split scores for [" + std::to_string(range.begin) + ", " +
                                             std::to_string(range.end) + ")");
  return it->second;
}

Eigen::VectorXd TableScoreProvider::label_scores(EduRange left, EduRange right) const {
  auto it = scores_->labels.find({left.begin, left.end, right.end});
  if (it == scores_->labels.end())
    throw Error(ErrorKind::MissingScore, doc_id_ + ": no label scores for [" + std::to_string(left.begin) + ", " +
                                             std::to_string(left.end) + ") + [" + std::to_string(right.begin) +
                                             ", " + std::to_string(right.end) + ")");
  return it->second;
}

DocumentScores dump_scores(const ScoreProvider& provider, std::size_t n, std::size_t label_count) {
  DocumentScores out;
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t e = b + 2; e <= n; ++e) {
      out.splits[{b, e}] = provider.split_scores({b, e});
      for (std::size_t m = b + 1; m < e; ++m) {
        Eigen::VectorXd v = provider.label_scores({b, m}, {m, e});
        if (static_cast<std::size_t>(v.size()) != label_count)
          throw Error(ErrorKind::ProviderLengthMismatch, "provider label vector has the wrong length");
        out.labels[{b, m, e}] = std::move(v);
      }
    }
  return out;
}

}  // namespace rstkit
