#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rstkit/error.hpp"

namespace rstkit {

enum class Nuclearity { NN, NS, SN };

std::string_view to_string(Nuclearity nuclearity);
Nuclearity parse_nuclearity(std::string_view text);

struct RelationLabel {
  std::string relation;
  Nuclearity nuclearity = Nuclearity::NN;

  friend bool operator==(const RelationLabel&, const RelationLabel&) = default;
};

// Inclusive token range.
struct Span {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t width() const { return last - first + 1; }
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

using EduSpan = Span;

struct Token {
  std::string text;
  std::size_t char_start = 0;
  std::size_t index = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

// Nested description of a binary tree, used to build and to describe trees.
// A leaf has `leaf` set and no children; an internal node has exactly two
// children and a label.
struct TreeSpec {
  std::optional<std::size_t> leaf;
  std::vector<TreeSpec> children;
  RelationLabel label;

  static TreeSpec make_leaf(std::size_t edu) { return TreeSpec{edu, {}, {}}; }
  static TreeSpec make_node(TreeSpec left, TreeSpec right, RelationLabel label);

  friend bool operator==(const TreeSpec&, const TreeSpec&) = default;
};

// Strictly binary discourse tree over EDUs 0..n-1. Nodes live in a flat
// pre-order array; node 0 is the root. Immutable after construction.
class RstTree {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  struct Node {
    std::size_t left = npos;
    std::size_t right = npos;
    std::size_t edu = npos;  // set on leaves only
    RelationLabel label;     // meaningful on internal nodes only
    std::size_t first_edu = 0;
    std::size_t last_edu = 0;
    Span span;  // token span

    bool is_leaf() const { return left == npos; }
    friend bool operator==(const Node&, const Node&) = default;
  };

  RstTree() = default;

  // Validates `spec` and caches token spans from `edus` (one span per leaf).
  RstTree(const TreeSpec& spec, std::span<const EduSpan> edus);
  // Each EDU is treated as a single token (EDU k covers token k).
  explicit RstTree(const TreeSpec& spec);

  std::size_t root() const { return 0; }
  const Node& node(std::size_t i) const { return nodes_[i]; }
  std::span<const Node> nodes() const { return nodes_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t leaf_count() const { return (nodes_.size() + 1) / 2; }
  bool empty() const { return nodes_.empty(); }
  Span span() const { return nodes_.front().span; }
  std::size_t depth() const;

  // Same topology and labels, token spans recomputed from new EDU spans.
  RstTree with_edus(std::span<const EduSpan> edus) const;
  // Same topology and spans, labels replaced node by node.
  template <typename Fn>
  RstTree map_labels(Fn&& fn) const {
    RstTree out = *this;
    for (auto& n : out.nodes_)
      if (!n.is_leaf()) n.label = fn(n.label);
    return out;
  }

  TreeSpec describe() const;
  std::vector<EduSpan> leaf_spans() const;

  friend bool operator==(const RstTree&, const RstTree&) = default;

 private:
  std::size_t build(const TreeSpec& spec, std::span<const EduSpan> edus);
  std::vector<Node> nodes_;
};

TreeSpec leaf(std::size_t edu);
TreeSpec node(TreeSpec left, TreeSpec right, std::string_view relation, Nuclearity nuclearity);

RstTree build_tree(const TreeSpec& spec, std::span<const EduSpan> edus);
RstTree build_tree(const TreeSpec& spec);

enum class Role { Nucleus, Satellite, Root };

std::string_view to_string(Role role);

// Unit of Parseval evaluation: one labelled span.
struct Constituent {
  Span span;
  Role role = Role::Nucleus;
  std::string relation;

  friend bool operator==(const Constituent&, const Constituent&) = default;
};

inline constexpr std::string_view kSpanRelation = "span";
inline constexpr std::string_view kRootRelation = "root";

struct ConstituentOptions {
  bool include_root = false;
};

// Non-root nodes ordered by (span start, span width). The satellite of a
// mononuclear relation carries the relation name and its nucleus carries
// "span"; both children of a multinuclear relation carry the relation name.
std::vector<Constituent> enumerate_constituents(const RstTree& tree,
                                                ConstituentOptions options = {});

enum class Language { en, ru, other };
enum class Split { train, dev, test };

std::string_view to_string(Language language);
std::string_view to_string(Split split);
Language parse_language(std::string_view text);
Split parse_split(std::string_view text);

struct DocumentRecord {
  std::string id;
  std::string genre;
  Language language = Language::other;
  std::vector<Token> tokens;
  std::vector<EduSpan> edus;
  std::optional<RstTree> tree;
  // Token index at which each sentence starts.
  std::optional<std::vector<std::size_t>> sentence_starts;
  Split split = Split::train;

  // Throws SchemaViolation when EDUs do not partition the tokens or the tree
  // leaf count disagrees with the EDU count.
  void validate() const;

  friend bool operator==(const DocumentRecord&, const DocumentRecord&) = default;
};

// Tokens with indices and offsets into the single-space join of their texts.
std::vector<Token> make_tokens(std::span<const std::string> texts);

// True when `edus` cover [0, n) exactly once, in order.
bool is_partition(std::span<const EduSpan> edus, std::size_t n);

struct Corpus {
  std::string name;
  std::vector<DocumentRecord> documents;
  std::vector<std::string> relation_inventory;

  void validate() const;
  // Sorted distinct relation names used by the trees.
  std::vector<std::string> observed_relations() const;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

struct TreeStats {
  std::size_t edu_count = 0;
  std::size_t token_count = 0;
  std::size_t depth = 0;

  friend bool operator==(const TreeStats&, const TreeStats&) = default;
};

TreeStats tree_stats(const DocumentRecord& doc);

// "relation_NUC" <-> (relation, nuclearity).
std::string merge_label(const RelationLabel& label);
RelationLabel split_label(std::string_view merged);

}  // namespace rstkit
