#include "rstkit/canonical.hpp"

#include <set>

#include <json.hpp>

#include "rstkit/tokenize.hpp"
#include "rstkit/treebank_io.hpp"

namespace rstkit {

using ordered_json = nlohmann::ordered_json;

namespace {

void check_relation_name(const DocumentRecord& doc, const std::string& name) {
  for (char c : name)
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')')
      throw Error(ErrorKind::SchemaViolation,
                  doc.id + ": relation '" + name + "' cannot be written in a bracketed tree string");
}

template <typename T>
T require(const ordered_json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::SchemaViolation, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::SchemaViolation, std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string to_canonical_line(const DocumentRecord& doc) {
  ordered_json j;
  j["id"] = doc.id;
  j["genre"] = doc.genre;
  j["lang"] = std::string(to_string(doc.language));
  auto tokens = ordered_json::array();
  for (const auto& t : doc.tokens) tokens.push_back(t.text);
  j["tokens"] = std::move(tokens);
  auto edus = ordered_json::array();
  for (const auto& e : doc.edus) edus.push_back({e.first, e.last});
  j["edus"] = std::move(edus);
  if (doc.tree) {
    for (const auto& n : doc.tree->nodes())
      if (!n.is_leaf()) check_relation_name(doc, n.label.relation);
    j["tree"] = format_tree(*doc.tree);
  } else {
    j["tree"] = nullptr;
  }
  if (doc.sentence_starts)
    j["sents"] = *doc.sentence_starts;
  else
    j["sents"] = nullptr;
  j["split"] = std::string(to_string(doc.split));
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
}

DocumentRecord from_canonical_line(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::SchemaViolation, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::SchemaViolation, "record is not a JSON object");
  for (const auto& [key, value] : j.items()) {
    static const std::set<std::string> known{"id", "genre", "lang", "tokens", "edus", "tree", "sents", "split"};
    if (!known.contains(key)) throw Error(ErrorKind::SchemaViolation, "unknown field '" + key + "'");
  }
  DocumentRecord doc;
  doc.id = require<std::string>(j, "id");
  doc.genre = require<std::string>(j, "genre");
  try {
    doc.language = parse_language(require<std::string>(j, "lang"));
    doc.split = parse_split(require<std::string>(j, "split"));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SchemaViolation) throw;
    throw Error(ErrorKind::SchemaViolation, e.what());
  }
  doc.tokens = make_tokens(require<std::vector<std::string>>(j, "tokens"));
  for (const auto& pair : require<std::vector<std::vector<std::size_t>>>(j, "edus")) {
    if (pair.size() != 2) throw Error(ErrorKind::SchemaViolation, "EDU entries must be [first, last] pairs");
    doc.edus.push_back({pair[0], pair[1]});
  }
  if (!j.contains("tree")) throw Error(ErrorKind::SchemaViolation, "missing field 'tree'");
  if (!j["tree"].is_null()) {
    if (!is_partition(doc.edus, doc.tokens.size()))
      throw Error(ErrorKind::SchemaViolation, doc.id + ": EDU spans do not partition the tokens");
    try {
      doc.tree = parse_tree(require<std::string>(j, "tree"), doc.edus);
    } catch (const Error& e) {
      throw Error(ErrorKind::SchemaViolation, doc.id + ": " + error_kind_name(e.kind()).data() + ": " + e.what());
    }
  }
  if (!j.contains("sents")) throw Error(ErrorKind::SchemaViolation, "missing field 'sents'");
  if (!j["sents"].is_null()) doc.sentence_starts = require<std::vector<std::size_t>>(j, "sents");
  doc.validate();
  return doc;
}

std::string write_canonical_string(const Corpus& corpus) {
  std::string out;
  for (const auto& doc : corpus.documents) {
    out += to_canonical_line(doc);
    out += '\n';
  }
  return out;
}

Corpus read_canonical_string(std::string_view contents, std::string name) {
  Corpus corpus;
  corpus.name = std::move(name);
  contents = strip_bom(contents);
  std::size_t line_no = 0;
  while (!contents.empty()) {
    const auto nl = contents.find('\n');
    std::string_view line = contents.substr(0, nl);
    contents = nl == std::string_view::npos ? std::string_view{} : contents.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    try {
      corpus.documents.push_back(from_canonical_line(line));
    } catch (const Error& e) {
      throw Error(ErrorKind::SchemaViolation, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  corpus.relation_inventory = corpus.observed_relations();
  try {
    corpus.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::SchemaViolation, e.what());
  }
  return corpus;
}

void write_canonical(const std::string& path, const Corpus& corpus) {
  write_file(path, write_canonical_string(corpus));
}

Corpus read_canonical(const std::string& path) {
  std::string name = path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  if (auto dot = name.find('.'); dot != std::string::npos) name = name.substr(0, dot);
  return read_canonical_string(read_file(path), name);
}

}  // namespace rstkit
