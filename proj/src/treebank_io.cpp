#include "rstkit/treebank_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "rstkit/tokenize.hpp"

namespace rstkit {

namespace pt = boost::property_tree;

std::size_t NaryTree::first_edu() const {
  if (edu) return *edu;
  std::size_t best = static_cast<std::size_t>(-1);
  for (const auto& c : children) best = std::min(best, c.first_edu());
  return best;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::optional<std::string> attr(const pt::ptree& node, const char* name) {
  auto a = node.get_child_optional(std::string("<xmlattr>.") + name);
  if (!a) return std::nullopt;
  return trim(a->data());
}

std::optional<std::string> nonempty(std::optional<std::string> v) {
  if (v && v->empty()) return std::nullopt;
  return v;
}

}  // namespace

Rs3Document parse_rs3_document(std::string_view bytes) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(strip_bom(bytes))};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorKind::MalformedXml, e.message() + " at line " + std::to_string(e.line()));
  }
  auto root = tree.get_child_optional("rst");
  if (!root) throw Error(ErrorKind::MalformedXml, "missing <rst> root element");

  Rs3Document doc;
  if (auto rels = root->get_child_optional("header.relations")) {
    for (const auto& [tag, rel] : *rels) {
      if (tag != "rel") continue;
      auto name = attr(rel, "name");
      if (!name || name->empty()) throw Error(ErrorKind::MalformedXml, "<rel> without name");
      auto type = attr(rel, "type").value_or("rst");
      doc.relations.push_back({to_lower(*name), type == "multinuc" ? RelationType::multinuc : RelationType::rst});
    }
  }
  auto body = root->get_child_optional("body");
  if (!body) throw Error(ErrorKind::MalformedXml, "missing <body>");

  std::set<std::string> ids;
  auto claim_id = [&](const std::optional<std::string>& id, const char* what) {
    if (!id || id->empty()) throw Error(ErrorKind::MalformedXml, std::string("<") + what + "> without id");
    if (!ids.insert(*id).second) throw Error(ErrorKind::SchemaViolation, "duplicate node id '" + *id + "'");
  };
  for (const auto& [tag, el] : *body) {
    if (tag == "segment") {
      Rs3Segment seg;
      auto id = attr(el, "id");
      claim_id(id, "segment");
      seg.id = *id;
      seg.parent = nonempty(attr(el, "parent"));
      if (auto r = nonempty(attr(el, "relname"))) seg.relname = to_lower(*r);
      seg.text = trim(el.data());
      if (seg.text.empty() || tokenize(seg.text).empty())
        throw Error(ErrorKind::EmptySegmentText, "segment '" + seg.id + "' has no text");
      doc.segments.push_back(std::move(seg));
    } else if (tag == "group") {
      Rs3Group group;
      auto id = attr(el, "id");
      claim_id(id, "group");
      group.id = *id;
      group.type = attr(el, "type").value_or("span") == "multinuc" ? GroupType::multinuc : GroupType::span;
      group.parent = nonempty(attr(el, "parent"));
      if (auto r = nonempty(attr(el, "relname"))) group.relname = to_lower(*r);
      doc.groups.push_back(std::move(group));
    }
  }

  std::set<std::string> relnames;
  for (const auto& r : doc.relations) relnames.insert(r.name);
  auto check = [&](const std::string& id, const std::optional<std::string>& parent,
                   const std::optional<std::string>& relname) {
    if (parent && !ids.contains(*parent))
      throw Error(ErrorKind::DanglingParentId, "node '" + id + "' points to missing parent '" + *parent + "'");
    if (parent && relname && *relname != kSpanRelation && !relnames.contains(*relname))
      throw Error(ErrorKind::UnknownRelname, "node '" + id + "' uses undeclared relation '" + *relname + "'");
  };
  for (const auto& s : doc.segments) check(s.id, s.parent, s.relname);
  for (const auto& g : doc.groups) check(g.id, g.parent, g.relname);
  return doc;
}

namespace {

struct RelationKinds {
  bool rst = false;
  bool multinuc = false;
};

class ForestBuilder {
 public:
  explicit ForestBuilder(const Rs3Document& doc) : doc_(doc) {
    for (const auto& r : doc.relations) {
      auto& k = kinds_[r.name];
      (r.type == RelationType::rst ? k.rst : k.multinuc) = true;
    }
    for (std::size_t i = 0; i < doc.segments.size(); ++i) {
      const auto& s = doc.segments[i];
      nodes_[s.id] = {true, i, s.parent, s.relname, GroupType::span};
      order_.push_back(s.id);
    }
    for (std::size_t i = 0; i < doc.groups.size(); ++i) {
      const auto& g = doc.groups[i];
      nodes_[g.id] = {false, i, g.parent, g.relname, g.type};
      order_.push_back(g.id);
    }
    for (const auto& id : order_) {
      const auto& n = nodes_.at(id);
      if (n.parent) children_[*n.parent].push_back(id);
    }
  }

  std::vector<Rs3Component> build() {
    std::vector<std::string> roots;
    for (const auto& id : order_)
      if (!nodes_.at(id).parent) roots.push_back(id);
    // Every segment must reach a root without cycles.
    for (const auto& s : doc_.segments) {
      std::set<std::string> seen;
      std::string cur = s.id;
      while (nodes_.at(cur).parent) {
        if (!seen.insert(cur).second) throw Error(ErrorKind::SchemaViolation, "parent cycle through '" + cur + "'");
        cur = *nodes_.at(cur).parent;
      }
    }
    std::vector<Rs3Component> components;
    for (const auto& root : roots) {
      std::vector<std::size_t> segs;
      collect_segments(root, segs);
      if (segs.empty()) continue;
      std::sort(segs.begin(), segs.end());
      local_.clear();
      for (std::size_t i = 0; i < segs.size(); ++i) local_[segs[i]] = i;
      Rs3Component comp;
      comp.segments = std::move(segs);
      comp.tree = build_node(root);
      components.push_back(std::move(comp));
    }
    std::sort(components.begin(), components.end(),
              [](const Rs3Component& a, const Rs3Component& b) { return a.segments.front() < b.segments.front(); });
    return components;
  }

 private:
  struct Info {
    bool segment = false;
    std::size_t index = 0;
    std::optional<std::string> parent;
    std::optional<std::string> relname;
    GroupType type = GroupType::span;
  };

  void collect_segments(const std::string& id, std::vector<std::size_t>& out) const {
    const auto& n = nodes_.at(id);
    if (n.segment) out.push_back(n.index);
    if (auto it = children_.find(id); it != children_.end())
      for (const auto& c : it->second) collect_segments(c, out);
  }

  std::size_t first_segment(const std::string& id) const {
    std::vector<std::size_t> segs;
    collect_segments(id, segs);
    if (segs.empty()) throw Error(ErrorKind::SchemaViolation, "group '" + id + "' covers no segments");
    return *std::min_element(segs.begin(), segs.end());
  }

  NaryTree build_node(const std::string& id) {
    const Info& info = nodes_.at(id);
    std::vector<std::string> kids;
    if (auto it = children_.find(id); it != children_.end()) kids = it->second;
    std::vector<std::pair<std::size_t, std::string>> ordered;
    for (const auto& k : kids) ordered.emplace_back(first_segment(k), k);
    std::sort(ordered.begin(), ordered.end());

    std::vector<std::string> span_kids;
    std::vector<std::string> members;
    std::vector<std::string> satellites;
    for (const auto& [pos, kid] : ordered) {
      const auto& rel = nodes_.at(kid).relname;
      if (!rel || *rel == kSpanRelation) {
        span_kids.push_back(kid);
        continue;
      }
      const auto kind = kinds_.at(*rel);
      const bool in_multinuc = !info.segment && info.type == GroupType::multinuc;
      if (in_multinuc && kind.multinuc)
        members.push_back(kid);
      else if (kind.rst)
        satellites.push_back(kid);
      else
        throw Error(ErrorKind::SchemaViolation,
                    "multinuclear relation '" + *rel + "' on '" + kid + "' outside a multinuc group");
    }

    NaryTree core;
    if (info.segment) {
      if (!span_kids.empty())
        throw Error(ErrorKind::SchemaViolation, "segment '" + id + "' has span children");
      core = NaryTree::make_leaf(local_.at(info.index));
    } else if (info.type == GroupType::span) {
      if (span_kids.size() != 1)
        throw Error(ErrorKind::SchemaViolation,
                    "span group '" + id + "' has " + std::to_string(span_kids.size()) + " span children");
      core = build_node(span_kids.front());
    } else {
      if (!span_kids.empty() || members.empty())
        throw Error(ErrorKind::SchemaViolation, "multinuc group '" + id + "' has no multinuclear members");
      for (const auto& m : members) {
        core.children.push_back(build_node(m));
        core.relations.push_back(*nodes_.at(m).relname);
        core.nuclear.push_back(true);
      }
    }
    if (satellites.empty()) return core;

    NaryTree mono;
    std::vector<std::pair<std::size_t, NaryTree>> parts;
    std::vector<std::string> rels;
    parts.emplace_back(core.first_edu(), std::move(core));
    for (const auto& s : satellites) {
      NaryTree sat = build_node(s);
      parts.emplace_back(sat.first_edu(), std::move(sat));
    }
    std::vector<std::size_t> order(parts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return parts[a].first < parts[b].first; });
    for (auto i : order) {
      mono.children.push_back(std::move(parts[i].second));
      mono.relations.push_back(i == 0 ? std::string(kSpanRelation) : *nodes_.at(satellites[i - 1]).relname);
      mono.nuclear.push_back(i == 0);
    }
    return mono;
  }

  const Rs3Document& doc_;
  std::map<std::string, RelationKinds> kinds_;
  std::unordered_map<std::string, Info> nodes_;
  std::unordered_map<std::string, std::vector<std::string>> children_;
  std::vector<std::string> order_;
  std::unordered_map<std::size_t, std::size_t> local_;
};

TreeSpec binarize_spec(const NaryTree& t) {
  if (t.edu) return TreeSpec::make_leaf(*t.edu);
  if (t.children.size() < 2)
    throw Error(ErrorKind::UnaryChain, "internal node with " + std::to_string(t.children.size()) + " child");
  if (t.relations.size() != t.children.size() || t.nuclear.size() != t.children.size())
    throw Error(ErrorKind::SchemaViolation, "n-ary node has inconsistent child annotations");
  std::size_t first = t.children.size();
  std::size_t last = 0;
  std::size_t nuclei = 0;
  for (std::size_t i = 0; i < t.children.size(); ++i) {
    if (!t.nuclear[i]) continue;
    first = std::min(first, i);
    last = i;
    ++nuclei;
  }
  if (nuclei == 0) throw Error(ErrorKind::SchemaViolation, "n-ary node without a nucleus");
  if (last - first + 1 != nuclei) throw Error(ErrorKind::SchemaViolation, "nuclei of an n-ary node are not adjacent");

  TreeSpec cur = binarize_spec(t.children[last]);
  for (std::size_t i = last; i-- > first;)
    cur = TreeSpec::make_node(binarize_spec(t.children[i]), std::move(cur), {t.relations[i], Nuclearity::NN});
  for (std::size_t i = last + 1; i < t.children.size(); ++i)
    cur = TreeSpec::make_node(std::move(cur), binarize_spec(t.children[i]), {t.relations[i], Nuclearity::NS});
  for (std::size_t i = first; i-- > 0;)
    cur = TreeSpec::make_node(binarize_spec(t.children[i]), std::move(cur), {t.relations[i], Nuclearity::SN});
  return cur;
}

}  // namespace

Rs3Forest parse_rs3(std::string_view bytes) {
  Rs3Forest forest;
  forest.document = parse_rs3_document(bytes);
  forest.components = ForestBuilder(forest.document).build();
  return forest;
}

RstTree binarize(const NaryTree& tree, std::span<const EduSpan> edus) { return RstTree(binarize_spec(tree), edus); }
RstTree binarize(const NaryTree& tree) { return RstTree(binarize_spec(tree)); }

NaryTree to_nary(const RstTree& tree) {
  auto rec = [&](auto&& self, std::size_t i) -> NaryTree {
    const auto& n = tree.node(i);
    if (n.is_leaf()) return NaryTree::make_leaf(n.edu);
    NaryTree out;
    out.children = {self(self, n.left), self(self, n.right)};
    const std::string span(kSpanRelation);
    switch (n.label.nuclearity) {
      case Nuclearity::NN:
        out.relations = {n.label.relation, n.label.relation};
        out.nuclear = {true, true};
        break;
      case Nuclearity::NS:
        out.relations = {span, n.label.relation};
        out.nuclear = {true, false};
        break;
      case Nuclearity::SN:
        out.relations = {n.label.relation, span};
        out.nuclear = {false, true};
        break;
    }
    return out;
  };
  return rec(rec, tree.root());
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Rs3Writer {
  const RstTree& tree;
  std::size_t next_id;
  std::vector<std::optional<std::pair<std::size_t, std::string>>> parent;  // by node id - 1
  std::vector<GroupType> group_types;                                      // for ids > segment count
  std::set<std::pair<std::string, RelationType>> relations;
  std::size_t segment_count;

  std::size_t new_group(GroupType type) {
    group_types.push_back(type);
    parent.emplace_back();
    return next_id++;
  }

  void attach(std::size_t child, std::size_t to, const std::string& rel) { parent[child - 1] = {{to, rel}}; }

  // Returns the rs3 id whose span is the node's span.
  std::size_t emit(std::size_t i) {
    const auto& n = tree.node(i);
    if (n.is_leaf()) return n.edu + 1;
    const auto& rel = n.label.relation;
    if (n.label.nuclearity == Nuclearity::NN) {
      relations.insert({rel, RelationType::multinuc});
      std::vector<std::size_t> members{n.left};
      std::size_t cur = n.right;
      while (!tree.node(cur).is_leaf() && tree.node(cur).label == n.label) {
        members.push_back(tree.node(cur).left);
        cur = tree.node(cur).right;
      }
      members.push_back(cur);
      const std::size_t group = new_group(GroupType::multinuc);
      for (auto m : members) attach(emit(m), group, rel);
      return group;
    }
    relations.insert({rel, RelationType::rst});
    const bool left_nucleus = n.label.nuclearity == Nuclearity::NS;
    const std::size_t group = new_group(GroupType::span);
    const std::size_t nucleus = emit(left_nucleus ? n.left : n.right);
    const std::size_t satellite = emit(left_nucleus ? n.right : n.left);
    attach(nucleus, group, std::string(kSpanRelation));
    attach(satellite, group, rel);
    return group;
  }
};

}  // namespace

std::string serialize_rs3(const DocumentRecord& doc) {
  if (!doc.tree) throw Error(ErrorKind::MissingTree, doc.id + ": cannot serialize a document without a tree");
  const auto& tree = *doc.tree;
  Rs3Writer w{tree, doc.edus.size() + 1, {}, {}, {}, doc.edus.size()};
  w.parent.resize(doc.edus.size());
  w.emit(tree.root());

  std::ostringstream out;
  out << "<rst>\n  <header>\n    <relations>\n";
  for (const auto& [name, type] : w.relations)
    out << "      <rel name=\"" << xml_escape(name) << "\" type=\""
        << (type == RelationType::rst ? "rst" : "multinuc") << "\"/>\n";
  out << "    </relations>\n  </header>\n  <body>\n";
  auto parent_attrs = [&](std::size_t id) {
    std::string s;
    if (const auto& p = w.parent[id - 1])
      s = " parent=\"" + std::to_string(p->first) + "\" relname=\"" + xml_escape(p->second) + "\"";
    return s;
  };
  for (std::size_t e = 0; e < doc.edus.size(); ++e) {
    std::string text;
    for (std::size_t t = doc.edus[e].first; t <= doc.edus[e].last; ++t) {
      if (!text.empty()) text += ' ';
      text += doc.tokens[t].text;
    }
    out << "    <segment id=\"" << e + 1 << "\"" << parent_attrs(e + 1) << ">" << xml_escape(text) << "</segment>\n";
  }
  for (std::size_t g = 0; g < w.group_types.size(); ++g) {
    const std::size_t id = doc.edus.size() + 1 + g;
    out << "    <group id=\"" << id << "\" type=\""
        << (w.group_types[g] == GroupType::span ? "span" : "multinuc") << "\"" << parent_attrs(id) << "/>\n";
  }
  out << "  </body>\n</rst>\n";
  return out.str();
}

std::string format_tree(const RstTree& tree) {
  std::string out;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    const auto& n = tree.node(i);
    if (n.is_leaf()) {
      out += '#';
      out += std::to_string(n.edu);
      return;
    }
    out += '(';
    out += merge_label(n.label);
    out += ' ';
    self(self, n.left);
    out += ' ';
    self(self, n.right);
    out += ')';
  };
  if (!tree.empty()) rec(rec, tree.root());
  return out;
}

namespace {

class TreeStringParser {
 public:
  explicit TreeStringParser(std::string_view text) : text_(text) {}

  TreeSpec parse() {
    TreeSpec spec = parse_node();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    return spec;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::ParseError, "tree string: " + what + " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view atom() {
    skip_space();
    const std::size_t begin = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')')
      ++pos_;
    if (begin == pos_) fail("expected a token");
    return text_.substr(begin, pos_ - begin);
  }

  TreeSpec parse_node() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end");
    if (text_[pos_] == '#') {
      ++pos_;
      auto digits = atom();
      std::size_t value = 0;
      for (char c : digits) {
        if (c < '0' || c > '9') fail("bad leaf index");
        value = value * 10 + static_cast<std::size_t>(c - '0');
      }
      return TreeSpec::make_leaf(value);
    }
    if (text_[pos_] != '(') fail("expected '(' or '#'");
    ++pos_;
    RelationLabel label = split_label(atom());
    TreeSpec spec;
    spec.label = std::move(label);
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) fail("unbalanced parentheses");
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      spec.children.push_back(parse_node());
    }
    return spec;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

TreeSpec parse_tree_spec(std::string_view text) { return TreeStringParser(text).parse(); }

RstTree parse_tree(std::string_view text, std::span<const EduSpan> edus) {
  return RstTree(parse_tree_spec(text), edus);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

}  // namespace rstkit
