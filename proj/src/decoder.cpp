#include "rstkit/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rstkit/segmenter.hpp"

namespace rstkit {

LabelInventory::LabelInventory(std::vector<std::string> merged) : names_(std::move(merged)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    labels_.push_back(split_label(names_[i]));
    if (!index_.emplace(names_[i], i).second)
      throw Error(ErrorKind::InvalidArgument, "duplicate label '" + names_[i] + "' in inventory");
  }
}

LabelInventory LabelInventory::from_corpus(const Corpus& corpus) {
  std::set<std::string> names;
  for (const auto& doc : corpus.documents)
    if (doc.tree)
      for (const auto& n : doc.tree->nodes())
        if (!n.is_leaf()) names.insert(merge_label(n.label));
  return LabelInventory({names.begin(), names.end()});
}

LabelInventory LabelInventory::from_tree(const RstTree& tree) {
  std::set<std::string> names;
  for (const auto& n : tree.nodes())
    if (!n.is_leaf()) names.insert(merge_label(n.label));
  return LabelInventory({names.begin(), names.end()});
}

std::optional<std::size_t> LabelInventory::index_of(const RelationLabel& label) const {
  if (auto it = index_.find(merge_label(label)); it != index_.end()) return it->second;
  return std::nullopt;
}

DecodeConfig DecodeConfig::beam(LabelInventory labels, std::size_t width) {
  if (width < 1) throw Error(ErrorKind::InvalidArgument, "beam width must be at least 1");
  return {DecodeStrategy::beam, width, std::move(labels)};
}

namespace {

struct Decision {
  std::size_t split;  // absolute index of the last EDU of the left part
  std::size_t label;

  friend auto operator<=>(const Decision&, const Decision&) = default;
};

class CachedScores {
 public:
  CachedScores(const ScoreProvider& provider, std::size_t inventory) : provider_(provider), inventory_(inventory) {}

  const Eigen::VectorXd& splits(EduRange r) {
    auto it = splits_.find(r);
    if (it != splits_.end()) return it->second;
    Eigen::VectorXd v = provider_.split_scores(r);
    if (static_cast<std::size_t>(v.size()) != r.size() - 1)
      throw Error(ErrorKind::ProviderLengthMismatch, "split scores for [" + std::to_string(r.begin) + ", " +
                                                         std::to_string(r.end) + ") have " +
                                                         std::to_string(v.size()) + " entries, expected " +
                                                         std::to_string(r.size() - 1));
    if (!v.allFinite()) throw Error(ErrorKind::InvalidArgument, "split scores must be finite");
    return splits_.emplace(r, std::move(v)).first->second;
  }

  const Eigen::VectorXd& labels(EduRange left, EduRange right) {
    const auto key = std::make_pair(left, right);
    auto it = labels_.find(key);
    if (it != labels_.end()) return it->second;
    Eigen::VectorXd v = provider_.label_scores(left, right);
    if (static_cast<std::size_t>(v.size()) != inventory_)
      throw Error(ErrorKind::ProviderLengthMismatch, "label scores have " + std::to_string(v.size()) +
                                                         " entries, inventory has " + std::to_string(inventory_));
    if (!v.allFinite()) throw Error(ErrorKind::InvalidArgument, "label scores must be finite");
    return labels_.emplace(key, std::move(v)).first->second;
  }

 private:
  const ScoreProvider& provider_;
  std::size_t inventory_;
  std::map<EduRange, Eigen::VectorXd> splits_;
  std::map<std::pair<EduRange, EduRange>, Eigen::VectorXd> labels_;
};

// First index of the maximum.
std::size_t argmax(const Eigen::VectorXd& v) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v(i) > v(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
  return best;
}

struct Hypothesis {
  double score = 0.0;
  std::vector<EduRange> pending;  // back() is expanded next
  std::vector<Decision> decisions;
};

bool better(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.decisions < b.decisions;
}

TreeSpec assemble(EduRange r, std::span<const Decision> decisions, std::size_t& next,
                  const LabelInventory& labels) {
  if (r.size() == 1) return TreeSpec::make_leaf(r.begin);
  const Decision d = decisions[next++];
  TreeSpec left = assemble({r.begin, d.split + 1}, decisions, next, labels);
  TreeSpec right = assemble({d.split + 1, r.end}, decisions, next, labels);
  return TreeSpec::make_node(std::move(left), std::move(right), labels.label(d.label));
}

Hypothesis initial(std::size_t n) {
  Hypothesis h;
  if (n > 1) h.pending.push_back({0, n});
  return h;
}

void push_children(Hypothesis& h, EduRange r, std::size_t split) {
  const EduRange left{r.begin, split + 1};
  const EduRange right{split + 1, r.end};
  if (right.size() > 1) h.pending.push_back(right);
  if (left.size() > 1) h.pending.push_back(left);
}

Hypothesis run_greedy(std::size_t n, CachedScores& scores) {
  Hypothesis h = initial(n);
  while (!h.pending.empty()) {
    const EduRange r = h.pending.back();
    h.pending.pop_back();
    const auto& splits = scores.splits(r);
    const std::size_t s = argmax(splits);
    const std::size_t split = r.begin + s;
    const auto& labels = scores.labels({r.begin, split + 1}, {split + 1, r.end});
    const std::size_t l = argmax(labels);
    h.score += splits(static_cast<Eigen::Index>(s));
    h.score += labels(static_cast<Eigen::Index>(l));
    h.decisions.push_back({split, l});
    push_children(h, r, split);
  }
  return h;
}

Hypothesis run_beam(std::size_t n, CachedScores& scores, std::size_t width) {
  struct Candidate {
    Hypothesis hyp;
    EduRange range;
  };
  std::vector<Hypothesis> beam{initial(n)};
  while (!beam.front().pending.empty()) {
    // Split candidates ranked by accumulated score plus the split score.
    std::vector<Candidate> candidates;
    for (const auto& h : beam) {
      const EduRange r = h.pending.back();
      const auto& splits = scores.splits(r);
      for (std::size_t s = 0; s + 1 < r.size(); ++s) {
        Candidate c{h, r};
        c.hyp.pending.pop_back();
        c.hyp.score += splits(static_cast<Eigen::Index>(s));
        c.hyp.decisions.push_back({r.begin + s, 0});
        push_children(c.hyp, r, r.begin + s);
        candidates.push_back(std::move(c));
      }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return better(a.hyp, b.hyp); });
    if (candidates.size() > width) candidates.resize(width);
    // Each surviving split takes its best label; the other labels of the
    // same split are dominated since they share every later decision.
    beam.clear();
    for (auto& c : candidates) {
      auto& d = c.hyp.decisions.back();
      const auto& labels = scores.labels({c.range.begin, d.split + 1}, {d.split + 1, c.range.end});
      d.label = argmax(labels);
      c.hyp.score += labels(static_cast<Eigen::Index>(d.label));
      beam.push_back(std::move(c.hyp));
    }
    std::stable_sort(beam.begin(), beam.end(), better);
  }
  return beam.front();
}

}  // namespace

RstTree decode(std::size_t n, const ScoreProvider& provider, const DecodeConfig& config) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "cannot decode a document without EDUs");
  if (n > 1 && config.labels.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty label inventory");
  CachedScores scores(provider, config.labels.size());
  Hypothesis best = run_greedy(n, scores);
  if (config.strategy == DecodeStrategy::beam && config.beam_width > 1) {
    Hypothesis b = run_beam(n, scores, config.beam_width);
    if (better(b, best)) best = std::move(b);
  }
  std::size_t next = 0;
  return RstTree(assemble({0, n}, best.decisions, next, config.labels));
}

}  // namespace rstkit

namespace rstkit {

double tree_score(const RstTree& tree, const ScoreProvider& provider, const LabelInventory& labels) {
  CachedScores scores(provider, labels.size());
  double total = 0.0;
  // Pre-order, split score before label score, as the decoder accumulates.
  for (const auto& n : tree.nodes()) {
    if (n.is_leaf()) continue;
    const auto& left = tree.node(n.left);
    const EduRange r{n.first_edu, n.last_edu + 1};
    const auto label = labels.index_of(n.label);
    if (!label) throw Error(ErrorKind::UnknownLabel, "label '" + merge_label(n.label) + "' is not in the inventory");
    total += scores.splits(r)(static_cast<Eigen::Index>(left.last_edu - r.begin));
    total += scores.labels({r.begin, left.last_edu + 1}, {left.last_edu + 1, r.end})(static_cast<Eigen::Index>(*label));
  }
  return total;
}

OracleProvider::OracleProvider(const RstTree& gold, LabelInventory labels) : labels_(std::move(labels)) {
  for (const auto& n : gold.nodes()) {
    if (n.is_leaf()) continue;
    const auto label = labels_.index_of(n.label);
    if (!label) throw Error(ErrorKind::UnknownLabel, "gold label '" + merge_label(n.label) + "' is not in the inventory");
    const auto& left = gold.node(n.left);
    gold_[{n.first_edu, n.last_edu + 1}] = {left.last_edu - n.first_edu, *label};
  }
}

Eigen::VectorXd OracleProvider::split_scores(EduRange range) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(range.size() - 1));
  if (auto it = gold_.find(range); it != gold_.end()) v(static_cast<Eigen::Index>(it->second.first)) = 1.0;
  return v;
}

Eigen::VectorXd OracleProvider::label_scores(EduRange left, EduRange right) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(labels_.size()));
  auto it = gold_.find({left.begin, right.end});
  if (it != gold_.end() && it->second.first == left.size() - 1) v(static_cast<Eigen::Index>(it->second.second)) = 1.0;
  return v;
}

OracleProvider oracle_provider(const RstTree& gold, LabelInventory labels) {
  return OracleProvider(gold, std::move(labels));
}

RightBranchingProvider::RightBranchingProvider(const RelationLabel& label, LabelInventory labels)
    : inventory_size_(labels.size()) {
  const auto index = labels.index_of(label);
  if (!index) throw Error(ErrorKind::UnknownLabel, "label '" + merge_label(label) + "' is not in the inventory");
  label_ = *index;
}

Eigen::VectorXd RightBranchingProvider::split_scores(EduRange range) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(range.size() - 1));
  v(0) = 1.0;
  return v;
}

Eigen::VectorXd RightBranchingProvider::label_scores(EduRange, EduRange) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inventory_size_));
  v(static_cast<Eigen::Index>(label_)) = 1.0;
  return v;
}

RightBranchingProvider right_branching_provider(const RelationLabel& label, LabelInventory labels) {
  return RightBranchingProvider(label, std::move(labels));
}

RelationLabel majority_label(const Corpus& corpus) {
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : corpus.documents)
    if (doc.tree)
      for (const auto& n : doc.tree->nodes())
        if (!n.is_leaf()) ++counts[merge_label(n.label)];
  if (counts.empty()) throw Error(ErrorKind::EmptyDataset, "corpus has no labelled internal nodes");
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it)
    if (it->second > best->second) best = it;
  return split_label(best->first);
}

SegmentedParse decode_with_segmentation(std::size_t token_count, std::span<const int> boundary_labels,
                                        const ScoreProvider& provider, const DecodeConfig& config) {
  if (boundary_labels.size() != token_count)
    throw Error(ErrorKind::DimensionMismatch, "one boundary label per token is required");
  if (token_count == 0) throw Error(ErrorKind::InvalidArgument, "cannot parse an empty document");
  SegmentedParse out;
  out.edus = labels_to_edus(boundary_labels);
  out.tree = decode(out.edus.size(), provider, config).with_edus(out.edus);
  return out;
}

}  // namespace rstkit
