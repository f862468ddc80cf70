#include "rstkit/core.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "rstkit/tokenize.hpp"

namespace rstkit {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonBinaryNode: return "NonBinaryNode";
    case ErrorKind::NonContiguousChildren: return "NonContiguousChildren";
    case ErrorKind::DuplicateLeaf: return "DuplicateLeaf";
    case ErrorKind::MissingTree: return "MissingTree";
    case ErrorKind::MalformedXml: return "MalformedXml";
    case ErrorKind::DanglingParentId: return "DanglingParentId";
    case ErrorKind::UnknownRelname: return "UnknownRelname";
    case ErrorKind::EmptySegmentText: return "EmptySegmentText";
    case ErrorKind::UnaryChain: return "UnaryChain";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::ProviderLengthMismatch: return "ProviderLengthMismatch";
    case ErrorKind::MissingScore: return "MissingScore";
    case ErrorKind::NonPositiveLoss: return "NonPositiveLoss";
    case ErrorKind::NaNLoss: return "NaNLoss";
    case ErrorKind::SpanRangeMismatch: return "SpanRangeMismatch";
    case ErrorKind::NotAPartition: return "NotAPartition";
    case ErrorKind::MissingSentences: return "MissingSentences";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

std::string_view to_string(Nuclearity nuclearity) {
  switch (nuclearity) {
    case Nuclearity::NN: return "NN";
    case Nuclearity::NS: return "NS";
    case Nuclearity::SN: return "SN";
  }
  return "NN";
}

Nuclearity parse_nuclearity(std::string_view text) {
  if (text == "NN") return Nuclearity::NN;
  if (text == "NS") return Nuclearity::NS;
  if (text == "SN") return Nuclearity::SN;
  throw Error(ErrorKind::ParseError, "invalid nuclearity '" + std::string(text) + "'");
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::Nucleus: return "N";
    case Role::Satellite: return "S";
    case Role::Root: return "R";
  }
  return "N";
}

std::string_view to_string(Language language) {
  switch (language) {
    case Language::en: return "en";
    case Language::ru: return "ru";
    case Language::other: return "other";
  }
  return "other";
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "train";
}

Language parse_language(std::string_view text) {
  if (text == "en") return Language::en;
  if (text == "ru") return Language::ru;
  if (text == "other") return Language::other;
  throw Error(ErrorKind::ParseError, "invalid language tag '" + std::string(text) + "'");
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::train;
  if (text == "dev") return Split::dev;
  if (text == "test") return Split::test;
  throw Error(ErrorKind::ParseError, "invalid split '" + std::string(text) + "'");
}

TreeSpec TreeSpec::make_node(TreeSpec left, TreeSpec right, RelationLabel label) {
  TreeSpec spec;
  spec.children.push_back(std::move(left));
  spec.children.push_back(std::move(right));
  spec.label = std::move(label);
  return spec;
}

TreeSpec leaf(std::size_t edu) { return TreeSpec::make_leaf(edu); }

TreeSpec node(TreeSpec left, TreeSpec right, std::string_view relation, Nuclearity nuclearity) {
  return TreeSpec::make_node(std::move(left), std::move(right),
                             RelationLabel{std::string(relation), nuclearity});
}

namespace {

void collect_leaves(const TreeSpec& spec, std::vector<std::size_t>& out) {
  if (spec.leaf) {
    if (!spec.children.empty())
      throw Error(ErrorKind::NonBinaryNode, "leaf node has children");
    out.push_back(*spec.leaf);
    return;
  }
  if (spec.children.size() != 2)
    throw Error(ErrorKind::NonBinaryNode,
                "internal node has " + std::to_string(spec.children.size()) + " children");
  for (const auto& child : spec.children) collect_leaves(child, out);
}

std::vector<EduSpan> unit_edus(std::size_t n) {
  std::vector<EduSpan> edus(n);
  for (std::size_t i = 0; i < n; ++i) edus[i] = {i, i};
  return edus;
}

}  // namespace

RstTree::RstTree(const TreeSpec& spec, std::span<const EduSpan> edus) {
  std::vector<std::size_t> leaves;
  collect_leaves(spec, leaves);
  std::unordered_set<std::size_t> seen;
  for (auto edu : leaves)
    if (!seen.insert(edu).second)
      throw Error(ErrorKind::DuplicateLeaf, "EDU " + std::to_string(edu) + " appears twice");
  if (*std::min_element(leaves.begin(), leaves.end()) != 0)
    throw Error(ErrorKind::NonContiguousChildren, "leaves do not start at EDU 0");
  if (edus.size() != leaves.size())
    throw Error(ErrorKind::DimensionMismatch,
                "tree has " + std::to_string(leaves.size()) + " leaves but " +
                    std::to_string(edus.size()) + " EDU spans were supplied");
  nodes_.reserve(2 * leaves.size() - 1);
  build(spec, edus);
}

RstTree::RstTree(const TreeSpec& spec) {
  std::vector<std::size_t> leaves;
  collect_leaves(spec, leaves);
  *this = RstTree(spec, unit_edus(leaves.size()));
}

std::size_t RstTree::build(const TreeSpec& spec, std::span<const EduSpan> edus) {
  const std::size_t index = nodes_.size();
  nodes_.emplace_back();
  if (spec.leaf) {
    const std::size_t edu = *spec.leaf;
    if (edu >= edus.size())
      throw Error(ErrorKind::NonContiguousChildren,
                  "leaf EDU " + std::to_string(edu) + " outside 0.." + std::to_string(edus.size() - 1));
    auto& n = nodes_[index];
    n.edu = edu;
    n.first_edu = n.last_edu = edu;
    n.span = edus[edu];
    return index;
  }
  const std::size_t left = build(spec.children[0], edus);
  const std::size_t right = build(spec.children[1], edus);
  const Node& l = nodes_[left];
  const Node& r = nodes_[right];
  if (l.last_edu + 1 != r.first_edu)
    throw Error(ErrorKind::NonContiguousChildren,
                "children cover EDUs " + std::to_string(l.first_edu) + "-" + std::to_string(l.last_edu) +
                    " and " + std::to_string(r.first_edu) + "-" + std::to_string(r.last_edu));
  if (l.span.last + 1 != r.span.first)
    throw Error(ErrorKind::NonContiguousChildren, "child token spans are not adjacent");
  Node n;
  n.left = left;
  n.right = right;
  n.label = spec.label;
  n.first_edu = l.first_edu;
  n.last_edu = r.last_edu;
  n.span = {l.span.first, r.span.last};
  nodes_[index] = std::move(n);
  return index;
}

std::size_t RstTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> level(nodes_.size(), 0);
  std::size_t best = 0;
  // Pre-order guarantees parents precede children.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    best = std::max(best, level[i]);
    if (!n.is_leaf()) level[n.left] = level[n.right] = level[i] + 1;
  }
  return best;
}

RstTree RstTree::with_edus(std::span<const EduSpan> edus) const {
  return RstTree(describe(), edus);
}

TreeSpec RstTree::describe() const {
  auto rec = [this](auto&& self, std::size_t i) -> TreeSpec {
    const auto& n = nodes_[i];
    if (n.is_leaf()) return TreeSpec::make_leaf(n.edu);
    return TreeSpec::make_node(self(self, n.left), self(self, n.right), n.label);
  };
  return rec(rec, 0);
}

std::vector<EduSpan> RstTree::leaf_spans() const {
  std::vector<EduSpan> spans(leaf_count());
  for (const auto& n : nodes_)
    if (n.is_leaf()) spans[n.edu] = n.span;
  return spans;
}

RstTree build_tree(const TreeSpec& spec, std::span<const EduSpan> edus) { return RstTree(spec, edus); }
RstTree build_tree(const TreeSpec& spec) { return RstTree(spec); }

std::vector<Constituent> enumerate_constituents(const RstTree& tree, ConstituentOptions options) {
  std::vector<Constituent> out;
  if (tree.empty()) return out;
  out.reserve(tree.node_count());
  if (options.include_root)
    out.push_back({tree.span(), Role::Root, std::string(kRootRelation)});
  for (const auto& n : tree.nodes()) {
    if (n.is_leaf()) continue;
    const auto& left = tree.node(n.left);
    const auto& right = tree.node(n.right);
    const std::string& rel = n.label.relation;
    const std::string span_rel(kSpanRelation);
    switch (n.label.nuclearity) {
      case Nuclearity::NN:
        out.push_back({left.span, Role::Nucleus, rel});
        out.push_back({right.span, Role::Nucleus, rel});
        break;
      case Nuclearity::NS:
        out.push_back({left.span, Role::Nucleus, span_rel});
        out.push_back({right.span, Role::Satellite, rel});
        break;
      case Nuclearity::SN:
        out.push_back({left.span, Role::Satellite, rel});
        out.push_back({right.span, Role::Nucleus, span_rel});
        break;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Constituent& a, const Constituent& b) {
    if (a.span.first != b.span.first) return a.span.first < b.span.first;
    return a.span.width() < b.span.width();
  });
  return out;
}

std::vector<Token> make_tokens(std::span<const std::string> texts) {
  std::vector<Token> tokens;
  tokens.reserve(texts.size());
  std::size_t offset = 0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    tokens.push_back({texts[i], offset, i});
    offset += texts[i].size() + 1;
  }
  return tokens;
}

bool is_partition(std::span<const EduSpan> edus, std::size_t n) {
  std::size_t next = 0;
  for (const auto& e : edus) {
    if (e.first != next || e.last < e.first) return false;
    next = e.last + 1;
  }
  return next == n && (n > 0 || edus.empty());
}

void DocumentRecord::validate() const {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].text.empty())
      throw Error(ErrorKind::SchemaViolation, id + ": token " + std::to_string(i) + " is empty");
    if (tokens[i].index != i)
      throw Error(ErrorKind::SchemaViolation, id + ": token indices are not consecutive");
  }
  if (!is_partition(edus, tokens.size()))
    throw Error(ErrorKind::SchemaViolation, id + ": EDU spans do not partition the tokens");
  if (tree) {
    if (tree->leaf_count() != edus.size())
      throw Error(ErrorKind::SchemaViolation,
                  id + ": tree has " + std::to_string(tree->leaf_count()) + " leaves for " +
                      std::to_string(edus.size()) + " EDUs");
    if (tree->leaf_spans() != edus)
      throw Error(ErrorKind::SchemaViolation, id + ": tree leaf spans disagree with EDUs");
  }
  if (sentence_starts) {
    const auto& s = *sentence_starts;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= tokens.size() || (i > 0 && s[i] <= s[i - 1]))
        throw Error(ErrorKind::SchemaViolation, id + ": sentence starts must be increasing token indices");
    }
    if (!s.empty() && s.front() != 0)
      throw Error(ErrorKind::SchemaViolation, id + ": first sentence must start at token 0");
  }
}

void Corpus::validate() const {
  std::set<std::string> ids;
  std::set<std::string> inventory(relation_inventory.begin(), relation_inventory.end());
  for (const auto& doc : documents) {
    if (!ids.insert(doc.id).second)
      throw Error(ErrorKind::SchemaViolation, "duplicate document id '" + doc.id + "'");
    doc.validate();
    if (!doc.tree) continue;
    for (const auto& n : doc.tree->nodes())
      if (!n.is_leaf() && !inventory.contains(n.label.relation))
        throw Error(ErrorKind::UnknownLabel,
                    doc.id + ": relation '" + n.label.relation + "' is not in the corpus inventory");
  }
}

std::vector<std::string> Corpus::observed_relations() const {
  std::set<std::string> names;
  for (const auto& doc : documents)
    if (doc.tree)
      for (const auto& n : doc.tree->nodes())
        if (!n.is_leaf()) names.insert(n.label.relation);
  return {names.begin(), names.end()};
}

TreeStats tree_stats(const DocumentRecord& doc) {
  if (!doc.tree) throw Error(ErrorKind::MissingTree, doc.id + ": document has no tree");
  return {doc.tree->leaf_count(), doc.tree->span().width(), doc.tree->depth()};
}

std::string merge_label(const RelationLabel& label) {
  return label.relation + "_" + std::string(to_string(label.nuclearity));
}

RelationLabel split_label(std::string_view merged) {
  const auto pos = merged.rfind('_');
  if (pos == std::string_view::npos || pos == 0)
    throw Error(ErrorKind::ParseError, "label '" + std::string(merged) + "' has no nuclearity suffix");
  return {std::string(merged.substr(0, pos)), parse_nuclearity(merged.substr(pos + 1))};
}

}  // namespace rstkit
