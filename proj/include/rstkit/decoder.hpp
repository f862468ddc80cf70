#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rstkit/core.hpp"

namespace rstkit {

// Half-open range of EDU indices [begin, end).
struct EduRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const EduRange&, const EduRange&) = default;
  friend auto operator<=>(const EduRange&, const EduRange&) = default;
};

// Merged relation+nuclearity labels the decoder chooses from.
class LabelInventory {
 public:
  LabelInventory() = default;
  explicit LabelInventory(std::vector<std::string> merged);
  static LabelInventory from_corpus(const Corpus& corpus);
  static LabelInventory from_tree(const RstTree& tree);

  std::size_t size() const { return labels_.size(); }
  const RelationLabel& label(std::size_t i) const { return labels_[i]; }
  std::span<const std::string> names() const { return names_; }
  std::optional<std::size_t> index_of(const RelationLabel& label) const;

 private:
  std::vector<std::string> names_;
  std::vector<RelationLabel> labels_;
  std::map<std::string, std::size_t> index_;
};

// Supplies log-domain decision scores to the decoder. split_scores(r)[s]
// scores splitting r into [r.begin, r.begin + s + 1) and the rest; it has
// r.size() - 1 entries. label_scores has one entry per inventory label.
// Implementations must tolerate concurrent const calls.
class ScoreProvider {
 public:
  virtual ~ScoreProvider() = default;
  virtual Eigen::VectorXd split_scores(EduRange range) const = 0;
  virtual Eigen::VectorXd label_scores(EduRange left, EduRange right) const = 0;
};

enum class DecodeStrategy { greedy, beam };

struct DecodeConfig {
  DecodeStrategy strategy = DecodeStrategy::greedy;
  std::size_t beam_width = 1;
  LabelInventory labels;

  static DecodeConfig greedy(LabelInventory labels) { return {DecodeStrategy::greedy, 1, std::move(labels)}; }
  static DecodeConfig beam(LabelInventory labels, std::size_t width);
};

// Top-down span splitting. Greedy takes the best split, then the best label
// for it, and recurses left then right. Beam keeps the `beam_width` best
// partial trees by accumulated score; ties prefer the earlier split point,
// then the lower label index. The greedy tree is kept as a candidate, so a
// beam never returns a lower-scoring tree than greedy.
RstTree decode(std::size_t n, const ScoreProvider& provider, const DecodeConfig& config);

// Sum of the split and label scores of every internal node.
double tree_score(const RstTree& tree, const ScoreProvider& provider, const LabelInventory& labels);

// Scores 1.0 for the gold split and gold label of every gold range, 0 elsewhere.
class OracleProvider final : public ScoreProvider {
 public:
  OracleProvider(const RstTree& gold, LabelInventory labels);

  Eigen::VectorXd split_scores(EduRange range) const override;
  Eigen::VectorXd label_scores(EduRange left, EduRange right) const override;

 private:
  LabelInventory labels_;
  std::map<EduRange, std::pair<std::size_t, std::size_t>> gold_;  // range -> (split offset, label)
};

OracleProvider oracle_provider(const RstTree& gold, LabelInventory labels);

// Always prefers the leftmost split and one fixed label, which yields a
// right-branching tree.
class RightBranchingProvider final : public ScoreProvider {
 public:
  RightBranchingProvider(const RelationLabel& label, LabelInventory labels);

  Eigen::VectorXd split_scores(EduRange range) const override;
  Eigen::VectorXd label_scores(EduRange left, EduRange right) const override;

 private:
  std::size_t label_;
  std::size_t inventory_size_;
};

RightBranchingProvider right_branching_provider(const RelationLabel& label, LabelInventory labels);

// Most frequent merged label over the corpus trees (ties: smaller name).
RelationLabel majority_label(const Corpus& corpus);

struct SegmentedParse {
  std::vector<EduSpan> edus;
  RstTree tree;  // spans in token offsets of `edus`
};

SegmentedParse decode_with_segmentation(std::size_t token_count, std::span<const int> boundary_labels,
                                        const ScoreProvider& provider, const DecodeConfig& config);

}  // namespace rstkit
