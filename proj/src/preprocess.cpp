#include "rstkit/preprocess.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "rstkit/tokenize.hpp"

namespace rstkit {

LabelPattern LabelPattern::parse(std::string_view text) {
  if (text.empty()) throw Error(ErrorKind::ParseError, "empty label pattern");
  const auto pos = text.rfind('_');
  if (pos != std::string_view::npos && pos > 0) {
    const auto suffix = text.substr(pos + 1);
    if (suffix == "NN" || suffix == "NS" || suffix == "SN")
      return {to_lower(text.substr(0, pos)), parse_nuclearity(suffix)};
  }
  return {to_lower(text), std::nullopt};
}

std::string LabelPattern::str() const {
  return nuclearity ? relation + "_" + std::string(to_string(*nuclearity)) : relation;
}

bool LabelPattern::matches(const RelationLabel& label) const {
  return label.relation == relation && (!nuclearity || *nuclearity == label.nuclearity);
}

RelationLabel RemapRule::apply(const RelationLabel& label) const {
  return {replace.relation, replace.nuclearity.value_or(label.nuclearity)};
}

RemapTable::RemapTable(std::vector<RemapRule> rules) : rules_(std::move(rules)) {
  for (const auto& r : rules_) {
    const bool same_relation = r.match.relation == r.replace.relation;
    if (same_relation && (!r.replace.nuclearity || r.replace.nuclearity == r.match.nuclearity))
      throw Error(ErrorKind::InvalidArgument, "remap rule maps '" + r.match.str() + "' to itself");
  }
}

RemapTable RemapTable::parse(std::string_view text) {
  std::vector<RemapRule> rules;
  std::istringstream in{std::string(strip_bom(text))};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string match;
    std::string replace;
    std::string extra;
    if (!(fields >> match)) continue;
    if (!(fields >> replace) || (fields >> extra))
      throw Error(ErrorKind::ParseError, "remap table line " + std::to_string(line_no) + ": expected two columns");
    rules.push_back({LabelPattern::parse(match), LabelPattern::parse(replace)});
  }
  return RemapTable(std::move(rules));
}

RemapTable RemapTable::load(const std::string& path) { return parse(read_file(path)); }

const RemapTable& RemapTable::rrt_default() {
  static const RemapTable table = parse(
      "# fine-grained relation merges (any nuclearity)\n"
      "antithesis      attribution\n"
      "cause           cause-effect\n"
      "effect          cause-effect\n"
      "motivation      condition\n"
      "evaluation      interpretation-evaluation\n"
      "interpretation  interpretation-evaluation\n"
      "# nuclearity-specific corrections\n"
      "restatement_SN  condition_SN\n"
      "restatement_NS  elaboration_NS\n"
      "solutionhood_NS solutionhood_SN\n"
      "preparation_NS  elaboration_NS\n"
      "elaboration_SN  preparation_SN\n"
      "background_NS   elaboration_SN\n");
  return table;
}

std::string RemapTable::dump() const {
  std::string out;
  for (const auto& r : rules_) out += r.match.str() + "\t" + r.replace.str() + "\n";
  return out;
}

std::optional<std::size_t> RemapTable::find(const RelationLabel& label) const {
  for (std::size_t i = 0; i < rules_.size(); ++i)
    if (rules_[i].match.matches(label)) return i;
  return std::nullopt;
}

RemapResult remap_labels(const RstTree& tree, const RemapTable& table, const std::set<std::string>& inventory) {
  RemapResult result;
  result.rule_hits.assign(table.rules().size(), 0);
  result.tree = tree.map_labels([&](const RelationLabel& label) {
    if (auto rule = table.find(label)) {
      ++result.rule_hits[*rule];
      return table.rules()[*rule].apply(label);
    }
    if (!inventory.empty() && !inventory.contains(label.relation))
      throw Error(ErrorKind::UnknownLabel, "relation '" + label.relation + "' is not in the inventory");
    return label;
  });
  return result;
}

RstTree remap_rrt_labels(const RstTree& tree, const RemapTable& table, const std::set<std::string>& inventory) {
  return remap_labels(tree, table, inventory).tree;
}

std::vector<DocumentRecord> split_forest(const Rs3Forest& forest, const ForestSource& source) {
  std::vector<DocumentRecord> out;
  const auto& segments = forest.document.segments;
  for (std::size_t c = 0; c < forest.components.size(); ++c) {
    const auto& comp = forest.components[c];
    DocumentRecord doc;
    doc.id = forest.components.size() == 1 ? source.id : source.id + "_part_" + std::to_string(c);
    doc.genre = source.genre;
    doc.language = source.language;
    doc.split = source.split;
    std::vector<std::string> texts;
    for (auto s : comp.segments) {
      auto toks = tokenize(segments[s].text);
      const std::size_t first = texts.size();
      texts.insert(texts.end(), toks.begin(), toks.end());
      doc.edus.push_back({first, texts.size() - 1});
    }
    doc.tokens = make_tokens(texts);
    try {
      doc.tree = binarize(comp.tree, doc.edus);
    } catch (const Error& e) {
      throw Error(e.kind(), doc.id + ": " + e.what());
    }
    out.push_back(std::move(doc));
  }
  return out;
}

ForestSource source_from_path(const std::string& path) {
  const std::filesystem::path p(path);
  ForestSource src;
  src.id = p.stem().string();
  const std::string stem = src.id;
  if (stem.starts_with("GUM_")) {
    const auto end = stem.find('_', 4);
    if (end != std::string::npos) src.genre = stem.substr(4, end - 4);
  }
  for (const auto& part : p.parent_path()) {
    const auto name = part.string();
    if (name == "train" || name == "dev" || name == "test") src.split = parse_split(name);
  }
  if (src.genre.empty()) {
    const auto parent = p.parent_path().filename().string();
    src.genre = parent.empty() || parent == "train" || parent == "dev" || parent == "test" ? "unknown" : parent;
  }
  return src;
}

Corpus load_rs3_directory(const std::string& dir, bool split_forests, std::size_t* files_read) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::Io, dir + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".rs3") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  Corpus corpus;
  corpus.name = fs::path(dir).filename().string();
  if (corpus.name.empty()) corpus.name = fs::path(dir).parent_path().filename().string();
  for (const auto& file : files) {
    Rs3Forest forest;
    try {
      forest = parse_rs3(read_file(file.string()));
    } catch (const Error& e) {
      throw Error(e.kind(), file.string() + ": " + e.what());
    }
    auto src = source_from_path(file.string());
    bool cyrillic = false;
    for (const auto& seg : forest.document.segments) cyrillic = cyrillic || has_cyrillic(seg.text);
    src.language = cyrillic ? Language::ru : Language::en;
    if (!split_forests && forest.components.size() > 1)
      throw Error(ErrorKind::SchemaViolation, file.string() + ": file holds " + std::to_string(forest.components.size()) +
                                                  " disconnected trees (use --split-forests)");
    for (auto& doc : split_forest(forest, src)) corpus.documents.push_back(std::move(doc));
  }
  if (files_read) *files_read = files.size();
  std::sort(corpus.documents.begin(), corpus.documents.end(),
            [](const DocumentRecord& a, const DocumentRecord& b) { return a.id < b.id; });
  corpus.relation_inventory = corpus.observed_relations();
  return corpus;
}

std::size_t filter_single_edu(Corpus& corpus) {
  const auto before = corpus.documents.size();
  std::erase_if(corpus.documents,
                [](const DocumentRecord& d) { return d.tree ? d.tree->leaf_count() == 1 : d.edus.size() == 1; });
  return before - corpus.documents.size();
}

void case_fold_labels(Corpus& corpus) {
  for (auto& doc : corpus.documents)
    if (doc.tree)
      doc.tree = doc.tree->map_labels([](const RelationLabel& l) { return RelationLabel{to_lower(l.relation), l.nuclearity}; });
  for (auto& r : corpus.relation_inventory) r = to_lower(r);
  std::sort(corpus.relation_inventory.begin(), corpus.relation_inventory.end());
  corpus.relation_inventory.erase(std::unique(corpus.relation_inventory.begin(), corpus.relation_inventory.end()),
                                  corpus.relation_inventory.end());
}

Histogram label_histogram(const Corpus& corpus) {
  Histogram h;
  for (const auto& doc : corpus.documents)
    if (doc.tree)
      for (const auto& n : doc.tree->nodes())
        if (!n.is_leaf()) ++h[merge_label(n.label)];
  return h;
}

std::string PreprocessReport::summary() const {
  std::ostringstream out;
  out << "source documents: " << source_documents << "\n"
      << "trees extracted: " << trees_extracted << "\n"
      << "single-EDU dropped: " << single_edu_dropped << "\n"
      << "documents out: " << documents_out << "\n";
  for (const auto& [rule, hits] : rule_hits) out << "rule " << rule << ": " << hits << "\n";
  std::set<std::string> classes_before;
  std::set<std::string> classes_after;
  for (const auto& [label, n] : before) classes_before.insert(split_label(label).relation);
  for (const auto& [label, n] : after) classes_after.insert(split_label(label).relation);
  out << "relation classes: " << classes_before.size() << " -> " << classes_after.size() << "\n";
  return out.str();
}

Corpus preprocess(Corpus corpus, const PreprocessOptions& options, PreprocessReport& report) {
  case_fold_labels(corpus);
  report.trees_extracted = corpus.documents.size();
  report.before = label_histogram(corpus);
  if (options.remap) {
    std::vector<std::size_t> hits(options.remap->rules().size(), 0);
    for (auto& doc : corpus.documents) {
      if (!doc.tree) continue;
      auto result = remap_labels(*doc.tree, *options.remap);
      for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += result.rule_hits[i];
      doc.tree = std::move(result.tree);
    }
    report.rule_hits.clear();
    for (std::size_t i = 0; i < hits.size(); ++i) report.rule_hits.emplace_back(options.remap->rules()[i].str(), hits[i]);
  }
  report.after = label_histogram(corpus);
  if (options.drop_single_edu) report.single_edu_dropped = filter_single_edu(corpus);
  corpus.relation_inventory = corpus.observed_relations();
  report.documents_out = corpus.documents.size();
  return corpus;
}

}  // namespace rstkit
