#include "rstkit/eval.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

#include "rstkit/tokenize.hpp"
#include "rstkit/treebank_io.hpp"

namespace rstkit {

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::S: return "S";
    case Metric::N: return "N";
    case Metric::R: return "R";
    case Metric::Full: return "Full";
  }
  return "?";
}

Metric parse_metric(std::string_view text) {
  for (Metric m : kAllMetrics)
    if (to_string(m) == text) return m;
  if (text == "full" || text == "F") return Metric::Full;
  throw Error(ErrorKind::InvalidArgument, "unknown metric '" + std::string(text) + "'");
}

double Counts::precision() const {
  if (pred == 0) return gold == 0 ? 100.0 : 0.0;
  return 100.0 * static_cast<double>(matched) / static_cast<double>(pred);
}

double Counts::recall() const {
  if (gold == 0) return pred == 0 ? 100.0 : 0.0;
  return 100.0 * static_cast<double>(matched) / static_cast<double>(gold);
}

double Counts::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

namespace {

using Key = std::tuple<std::size_t, std::size_t, int, std::string>;

Key key_of(const Constituent& c, Metric m) {
  const int role = (m == Metric::N || m == Metric::Full) ? static_cast<int>(c.role) : -1;
  std::string rel = (m == Metric::R || m == Metric::Full) ? c.relation : std::string();
  return {c.span.first, c.span.last, role, std::move(rel)};
}

// Size of the multiset intersection of the two key lists.
std::size_t intersect(std::vector<Key> a, std::vector<Key> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0, n = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++n, ++i, ++j;
    }
  }
  return n;
}

bool agree(const Constituent& g, const Constituent& p, Metric m) {
  if (g.span != p.span) return false;
  if ((m == Metric::N || m == Metric::Full) && g.role != p.role) return false;
  if ((m == Metric::R || m == Metric::Full) && g.relation != p.relation) return false;
  return true;
}

}  // namespace

ParsevalScores parseval(std::span<const Constituent> gold, std::span<const Constituent> pred) {
  ParsevalScores s;
  for (Metric m : kAllMetrics) {
    std::vector<Key> g, p;
    g.reserve(gold.size());
    p.reserve(pred.size());
    for (const auto& c : gold) g.push_back(key_of(c, m));
    for (const auto& c : pred) p.push_back(key_of(c, m));
    s[m] = {intersect(std::move(g), std::move(p)), gold.size(), pred.size()};
  }
  return s;
}

ParsevalScores parseval(const RstTree& gold, const RstTree& pred, ConstituentOptions options) {
  if (gold.span() != pred.span())
    throw Error(ErrorKind::SpanRangeMismatch,
                "gold covers tokens " + std::to_string(gold.span().first) + ".." + std::to_string(gold.span().last) +
                    " but prediction covers " + std::to_string(pred.span().first) + ".." +
                    std::to_string(pred.span().last));
  const auto g = enumerate_constituents(gold, options);
  const auto p = enumerate_constituents(pred, options);
  return parseval(g, p);
}

ParsevalScores parseval_all_pairs(std::span<const Constituent> gold, std::span<const Constituent> pred) {
  ParsevalScores s;
  for (Metric m : kAllMetrics) {
    std::vector<bool> used(pred.size(), false);
    std::size_t matched = 0;
    for (const auto& g : gold)
      for (std::size_t j = 0; j < pred.size(); ++j)
        if (!used[j] && agree(g, pred[j], m)) {
          used[j] = true;
          ++matched;
          break;
        }
    s[m] = {matched, gold.size(), pred.size()};
  }
  return s;
}

SegScores segmentation_f1(std::span<const EduSpan> gold, std::span<const EduSpan> pred, std::size_t token_count) {
  if (!is_partition(gold, token_count))
    throw Error(ErrorKind::NotAPartition, "gold EDUs do not partition " + std::to_string(token_count) + " tokens");
  if (!is_partition(pred, token_count))
    throw Error(ErrorKind::NotAPartition,
                "predicted EDUs do not partition " + std::to_string(token_count) + " tokens");
  std::vector<bool> in_gold(token_count, false);
  for (const auto& e : gold) in_gold[e.first] = true;
  SegScores s;
  s.boundaries.gold = gold.empty() ? 0 : gold.size() - 1;
  s.boundaries.pred = pred.empty() ? 0 : pred.size() - 1;
  for (const auto& e : pred)
    if (e.first != 0 && in_gold[e.first]) ++s.boundaries.matched;
  return s;
}

EndToEndScores end_to_end_eval(const DocumentRecord& gold, std::span<const EduSpan> pred_edus,
                               const RstTree& pred_tree) {
  if (!gold.tree) throw Error(ErrorKind::MissingTree, gold.id + ": gold document has no tree");
  if (pred_tree.leaf_count() != pred_edus.size() || pred_tree.leaf_spans() != std::vector<EduSpan>(pred_edus.begin(), pred_edus.end()))
    throw Error(ErrorKind::DimensionMismatch, gold.id + ": predicted tree leaves differ from predicted EDUs");
  EndToEndScores out;
  out.segmentation = segmentation_f1(gold.edus, pred_edus, gold.tokens.size());
  out.parseval = parseval(*gold.tree, pred_tree);
  return out;
}

EvalReport evaluate(const Corpus& gold, const Corpus& pred, bool end_to_end) {
  std::map<std::string, const DocumentRecord*> predicted;
  for (const auto& d : pred.documents) predicted[d.id] = &d;
  EvalReport report;
  for (const auto& g : gold.documents) {
    auto it = predicted.find(g.id);
    if (it == predicted.end()) throw Error(ErrorKind::SchemaViolation, g.id + ": no prediction for document");
    const DocumentRecord& p = *it->second;
    if (!p.tree) throw Error(ErrorKind::MissingTree, g.id + ": prediction has no tree");
    if (!g.tree) throw Error(ErrorKind::MissingTree, g.id + ": gold document has no tree");
    if (p.tokens.size() != g.tokens.size())
      throw Error(ErrorKind::SpanRangeMismatch, g.id + ": prediction has " + std::to_string(p.tokens.size()) +
                                                    " tokens, gold has " + std::to_string(g.tokens.size()));
    EndToEndScores s;
    if (end_to_end) {
      s = end_to_end_eval(g, p.edus, *p.tree);
    } else {
      if (p.edus != g.edus)
        throw Error(ErrorKind::SchemaViolation, g.id + ": prediction changes the gold segmentation (use end-to-end)");
      s.segmentation = segmentation_f1(g.edus, p.edus, g.tokens.size());
      s.parseval = parseval(*g.tree, *p.tree);
    }
    report.total += s.parseval;
    report.segmentation.boundaries += s.segmentation.boundaries;
    report.by_genre[g.genre] += s.parseval;
    report.segmentation_by_genre[g.genre].boundaries += s.segmentation.boundaries;
    ++report.documents;
  }
  return report;
}

SentenceTable parse_sentence_file(std::string_view text) {
  SentenceTable table;
  std::istringstream in{std::string(strip_bom(text))};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string id;
    if (!(fields >> id) || id[0] == '#') continue;
    std::vector<std::size_t> starts;
    for (std::string f; fields >> f;) {
      std::size_t pos = 0;
      unsigned long v = 0;
      try {
        v = std::stoul(f, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != f.size() || f.empty() || f[0] == '-')
        throw Error(ErrorKind::ParseError, "sentence file line " + std::to_string(line_no) + ": bad start '" + f + "'");
      starts.push_back(v);
    }
    if (!std::is_sorted(starts.begin(), starts.end()) ||
        std::adjacent_find(starts.begin(), starts.end()) != starts.end() || starts.empty() || starts[0] != 0)
      throw Error(ErrorKind::ParseError, "sentence file line " + std::to_string(line_no) +
                                             ": starts must begin at 0 and increase strictly");
    if (!table.emplace(id, std::move(starts)).second)
      throw Error(ErrorKind::ParseError, "sentence file line " + std::to_string(line_no) + ": duplicate id " + id);
  }
  return table;
}

SentenceTable load_sentence_file(const std::string& path) { return parse_sentence_file(read_file(path)); }

void attach_sentences(Corpus& corpus, const SentenceTable& table) {
  for (auto& doc : corpus.documents) {
    auto it = table.find(doc.id);
    if (it == table.end()) continue;
    if (!it->second.empty() && it->second.back() >= doc.tokens.size())
      throw Error(ErrorKind::SchemaViolation, doc.id + ": sentence start beyond the last token");
    doc.sentence_starts = it->second;
  }
}

double SpannedCounts::non_elementary_percent() const {
  const std::size_t non_elementary = sentences - elementary;
  return non_elementary == 0 ? 100.0 : 100.0 * static_cast<double>(spanned) / static_cast<double>(non_elementary);
}

double SpannedCounts::overall_percent() const {
  return sentences == 0 ? 100.0 : 100.0 * static_cast<double>(spanned + elementary) / static_cast<double>(sentences);
}

SpannedCounts spanned_sentences(const RstTree& tree, std::span<const EduSpan> edus,
                                std::span<const std::size_t> sentence_starts, std::size_t token_count) {
  std::set<Span> node_spans;
  for (const auto& n : tree.nodes()) node_spans.insert(n.span);
  // EDU index of every token.
  std::vector<std::size_t> edu_of(token_count, 0);
  for (std::size_t e = 0; e < edus.size(); ++e)
    for (std::size_t t = edus[e].first; t <= edus[e].last && t < token_count; ++t) edu_of[t] = e;
  SpannedCounts c;
  for (std::size_t i = 0; i < sentence_starts.size(); ++i) {
    const std::size_t first = sentence_starts[i];
    const std::size_t end = i + 1 < sentence_starts.size() ? sentence_starts[i + 1] : token_count;
    if (first >= end) continue;
    const Span s{first, end - 1};
    ++c.sentences;
    if (edu_of[s.first] == edu_of[s.last]) {
      ++c.elementary;
    } else if (node_spans.contains(s)) {
      ++c.spanned;
    }
  }
  return c;
}

CorpusStats corpus_stats(const Corpus& corpus, bool with_sentences) {
  if (corpus.documents.empty()) throw Error(ErrorKind::EmptyDataset, "corpus has no documents");
  CorpusStats s;
  std::set<std::string> genres;
  std::vector<std::size_t> tokens;
  for (const auto& doc : corpus.documents) {
    const auto ts = tree_stats(doc);
    genres.insert(doc.genre);
    tokens.push_back(ts.token_count);
    s.edus += ts.edu_count;
    s.relation_pairs += doc.tree->leaf_count() - 1;
    for (const auto& c : enumerate_constituents(*doc.tree))
      if (c.relation != kSpanRelation) ++s.labelled_constituents;
    if (with_sentences) {
      if (!doc.sentence_starts)
        throw Error(ErrorKind::MissingSentences, doc.id + ": no sentence boundaries supplied");
      if (!s.spanned) s.spanned.emplace();
      *s.spanned += spanned_sentences(*doc.tree, doc.edus, *doc.sentence_starts, doc.tokens.size());
    }
  }
  s.genres = genres.size();
  s.docs = corpus.documents.size();
  s.classes = corpus.observed_relations().size();
  std::sort(tokens.begin(), tokens.end());
  s.tokens_min = tokens.front();
  s.tokens_max = tokens.back();
  const std::size_t mid = tokens.size() / 2;
  s.tokens_median = tokens.size() % 2 == 1 ? static_cast<double>(tokens[mid])
                                           : (static_cast<double>(tokens[mid - 1]) + static_cast<double>(tokens[mid])) / 2.0;
  s.edus_per_tree = static_cast<double>(s.edus) / static_cast<double>(s.docs);
  return s;
}

std::map<std::string, CorpusStats> genre_breakdown(const Corpus& corpus, bool with_sentences) {
  std::map<std::string, Corpus> groups;
  for (const auto& doc : corpus.documents) {
    auto& g = groups[doc.genre];
    g.name = corpus.name + ":" + doc.genre;
    g.documents.push_back(doc);
  }
  std::map<std::string, CorpusStats> out;
  for (const auto& [genre, sub] : groups) out.emplace(genre, corpus_stats(sub, with_sentences));
  return out;
}

std::map<std::string, ParsevalScores> genre_breakdown(const Corpus& gold, const Corpus& pred, bool end_to_end) {
  return evaluate(gold, pred, end_to_end).by_genre;
}

}  // namespace rstkit
