#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rstkit/core.hpp"

namespace rstkit {

enum class Metric { S, N, R, Full };
inline constexpr std::array<Metric, 4> kAllMetrics{Metric::S, Metric::N, Metric::R, Metric::Full};

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view text);

struct Counts {
  std::size_t matched = 0;
  std::size_t gold = 0;
  std::size_t pred = 0;

  // Percentages. An empty gold and prediction side count as a perfect 100.
  double precision() const;
  double recall() const;
  double f1() const;

  Counts& operator+=(const Counts& o) {
    matched += o.matched;
    gold += o.gold;
    pred += o.pred;
    return *this;
  }
  friend bool operator==(const Counts&, const Counts&) = default;
};

// Micro-averaged: add per-document scores, then read P/R/F1.
struct ParsevalScores {
  std::array<Counts, 4> counts{};

  const Counts& operator[](Metric m) const { return counts[static_cast<std::size_t>(m)]; }
  Counts& operator[](Metric m) { return counts[static_cast<std::size_t>(m)]; }

  ParsevalScores& operator+=(const ParsevalScores& o) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
    return *this;
  }
  friend bool operator==(const ParsevalScores&, const ParsevalScores&) = default;
};

// Original Parseval over token spans of the two trees' constituents.
ParsevalScores parseval(const RstTree& gold, const RstTree& pred, ConstituentOptions options = {});
ParsevalScores parseval(std::span<const Constituent> gold, std::span<const Constituent> pred);

// Quadratic reference matcher (every gold against every unused prediction).
ParsevalScores parseval_all_pairs(std::span<const Constituent> gold, std::span<const Constituent> pred);

struct SegScores {
  Counts boundaries;
};

// Boundaries are EDU-initial tokens other than token 0.
SegScores segmentation_f1(std::span<const EduSpan> gold, std::span<const EduSpan> pred, std::size_t token_count);

struct EndToEndScores {
  SegScores segmentation;
  ParsevalScores parseval;
};

// `pred_tree` must already carry the token spans of `pred_edus`.
EndToEndScores end_to_end_eval(const DocumentRecord& gold, std::span<const EduSpan> pred_edus,
                               const RstTree& pred_tree);

struct EvalReport {
  ParsevalScores total;
  SegScores segmentation;
  std::map<std::string, ParsevalScores> by_genre;
  std::map<std::string, SegScores> segmentation_by_genre;
  std::size_t documents = 0;
};

// Pairs documents by id. With `end_to_end` the predicted EDUs are used;
// otherwise predictions must keep the gold segmentation.
EvalReport evaluate(const Corpus& gold, const Corpus& pred, bool end_to_end);

// Sentence starts per document id, read from lines "<doc id> <start> <start> ...".
using SentenceTable = std::map<std::string, std::vector<std::size_t>>;
SentenceTable parse_sentence_file(std::string_view text);
SentenceTable load_sentence_file(const std::string& path);
void attach_sentences(Corpus& corpus, const SentenceTable& table);

struct SpannedCounts {
  std::size_t sentences = 0;
  std::size_t elementary = 0;  // inside a single EDU
  std::size_t spanned = 0;     // non-elementary and equal to a tree node span

  double non_elementary_percent() const;
  double overall_percent() const;  // elementary sentences count as spanned

  SpannedCounts& operator+=(const SpannedCounts& o) {
    sentences += o.sentences;
    elementary += o.elementary;
    spanned += o.spanned;
    return *this;
  }
};

SpannedCounts spanned_sentences(const RstTree& tree, std::span<const EduSpan> edus,
                                std::span<const std::size_t> sentence_starts, std::size_t token_count);

struct CorpusStats {
  std::size_t genres = 0;
  std::size_t docs = 0;
  std::size_t classes = 0;
  std::size_t tokens_min = 0;
  std::size_t tokens_max = 0;
  double tokens_median = 0;
  std::optional<SpannedCounts> spanned;
  std::size_t edus = 0;
  double edus_per_tree = 0;
  std::size_t relation_pairs = 0;        // internal nodes
  std::size_t labelled_constituents = 0;  // non-root constituents whose relation is not "span"
};

// Sentences are required when `with_sentences` is set (MissingSentences).
CorpusStats corpus_stats(const Corpus& corpus, bool with_sentences);

std::map<std::string, CorpusStats> genre_breakdown(const Corpus& corpus, bool with_sentences);
std::map<std::string, ParsevalScores> genre_breakdown(const Corpus& gold, const Corpus& pred, bool end_to_end);

}  // namespace rstkit
