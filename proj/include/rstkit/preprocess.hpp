#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rstkit/core.hpp"
#include "rstkit/treebank_io.hpp"

namespace rstkit {

// A label pattern: a bare relation ("cause") matches any nuclearity; a
// merged label ("restatement_SN") matches that nuclearity only.
struct LabelPattern {
  std::string relation;
  std::optional<Nuclearity> nuclearity;

  static LabelPattern parse(std::string_view text);
  std::string str() const;
  bool matches(const RelationLabel& label) const;

  friend bool operator==(const LabelPattern&, const LabelPattern&) = default;
};

struct RemapRule {
  LabelPattern match;
  LabelPattern replace;  // a bare relation keeps the original nuclearity

  RelationLabel apply(const RelationLabel& label) const;
  std::string str() const { return match.str() + " -> " + replace.str(); }
};

// Ordered relabelling rules. Each label is rewritten by the first matching
// rule only; outputs are never fed back through the table.
class RemapTable {
 public:
  RemapTable() = default;
  explicit RemapTable(std::vector<RemapRule> rules);

  // Plain-text table, one rule per line: "<match> <replace>" separated by
  // whitespace (or a tab). '#' starts a comment.
  static RemapTable parse(std::string_view text);
  static RemapTable load(const std::string& path);
  // Relabelling rules for RuRSTreebank: fine-grained name merges first, then
  // the nuclearity-specific corrections.
  static const RemapTable& rrt_default();

  std::string dump() const;
  std::span<const RemapRule> rules() const { return rules_; }
  // Index of the first matching rule, if any.
  std::optional<std::size_t> find(const RelationLabel& label) const;

 private:
  std::vector<RemapRule> rules_;
};

struct RemapResult {
  RstTree tree;
  std::vector<std::size_t> rule_hits;  // one count per rule
};

// Rewrites every internal label. With a non-empty `inventory`, labels that
// no rule matches must belong to it (UnknownLabel otherwise).
RemapResult remap_labels(const RstTree& tree, const RemapTable& table,
                         const std::set<std::string>& inventory = {});
RstTree remap_rrt_labels(const RstTree& tree, const RemapTable& table,
                         const std::set<std::string>& inventory = {});

struct ForestSource {
  std::string id;
  std::string genre;
  Language language = Language::other;
  Split split = Split::train;
};

// One record per connected component. A single component keeps the source
// id; several components are numbered "<id>_part_<i>" from 0 in text order.
std::vector<DocumentRecord> split_forest(const Rs3Forest& forest, const ForestSource& source);

// Source metadata guessed from a file path: GUM-style names
// ("GUM_<genre>_<name>.rs3") give the genre, otherwise the parent directory
// does; a "train"/"dev"/"test" path component gives the split.
ForestSource source_from_path(const std::string& path);

// Reads every .rs3 file under `dir` (recursively, sorted by path). Without
// `split_forests`, a file holding several trees is a SchemaViolation.
// Language is "ru" when the text contains Cyrillic, "en" otherwise.
Corpus load_rs3_directory(const std::string& dir, bool split_forests, std::size_t* files_read = nullptr);

// Removes documents whose tree is a single EDU. Returns the number dropped.
std::size_t filter_single_edu(Corpus& corpus);

// Lowercases every relation name of every tree.
void case_fold_labels(Corpus& corpus);

using Histogram = std::map<std::string, std::size_t>;

// Merged-label histogram over internal nodes.
Histogram label_histogram(const Corpus& corpus);

struct PreprocessReport {
  std::size_t source_documents = 0;  // files or records read
  std::size_t trees_extracted = 0;   // documents entering filtering
  std::size_t single_edu_dropped = 0;
  std::size_t documents_out = 0;
  std::vector<std::pair<std::string, std::size_t>> rule_hits;
  Histogram before;
  Histogram after;

  std::string summary() const;
};

struct PreprocessOptions {
  std::optional<RemapTable> remap;
  bool drop_single_edu = false;
};

// Case-folds, optionally remaps and filters. `report` is filled in.
Corpus preprocess(Corpus corpus, const PreprocessOptions& options, PreprocessReport& report);

}  // namespace rstkit
