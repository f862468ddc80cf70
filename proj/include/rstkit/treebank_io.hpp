#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rstkit/core.hpp"

namespace rstkit {

enum class RelationType { rst, multinuc };
enum class GroupType { span, multinuc };

struct Rs3Relation {
  std::string name;
  RelationType type = RelationType::rst;
};

struct Rs3Segment {
  std::string id;
  std::optional<std::string> parent;
  std::optional<std::string> relname;
  std::string text;
};

struct Rs3Group {
  std::string id;
  GroupType type = GroupType::span;
  std::optional<std::string> parent;
  std::optional<std::string> relname;
};

// Raw contents of an .rs3 file. Relation names are lowercased.
struct Rs3Document {
  std::vector<Rs3Relation> relations;
  std::vector<Rs3Segment> segments;  // in file order
  std::vector<Rs3Group> groups;
};

// Ordered n-ary discourse tree. Every child is either a nucleus or a
// satellite and carries the relation it participates in ("span" for the
// nucleus of a mononuclear node). Leaves index EDUs of their component.
struct NaryTree {
  std::optional<std::size_t> edu;
  std::vector<NaryTree> children;
  std::vector<std::string> relations;
  std::vector<bool> nuclear;

  static NaryTree make_leaf(std::size_t edu) { return NaryTree{edu, {}, {}, {}}; }
  std::size_t first_edu() const;

  friend bool operator==(const NaryTree&, const NaryTree&) = default;
};

// One connected tree of an .rs3 forest.
struct Rs3Component {
  std::vector<std::size_t> segments;  // indices into Rs3Document::segments, in text order
  NaryTree tree;                      // leaves are positions in `segments`
};

struct Rs3Forest {
  Rs3Document document;
  std::vector<Rs3Component> components;  // ordered by first segment
};

Rs3Document parse_rs3_document(std::string_view bytes);
Rs3Forest parse_rs3(std::string_view bytes);

// Multinuclear nodes become right-branching NN cascades labelled with the
// multinuclear relation. A nucleus with several satellites absorbs its
// right-hand satellites nearest first, then its left-hand ones nearest first.
RstTree binarize(const NaryTree& tree, std::span<const EduSpan> edus);
RstTree binarize(const NaryTree& tree);
NaryTree to_nary(const RstTree& tree);

// Emits .rs3 XML. Right-nested NN chains with the same relation are merged
// back into one multinuclear group.
std::string serialize_rs3(const DocumentRecord& doc);

// "(elaboration_NS #0 (joint_NN #1 #2))"
std::string format_tree(const RstTree& tree);
TreeSpec parse_tree_spec(std::string_view text);
RstTree parse_tree(std::string_view text, std::span<const EduSpan> edus);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace rstkit
