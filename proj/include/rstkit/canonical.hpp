#pragma once

#include <string>
#include <string_view>

#include "rstkit/core.hpp"

namespace rstkit {

// Canonical corpus format: UTF-8, one JSON object per line with the fields
// id, genre, lang, tokens, edus, tree, sents, split (in that order).
//   tokens: ["The", "cat", ...]
//   edus:   [[first, last], ...]   inclusive token indices
//   tree:   bracketed tree string or null
//   sents:  sentence-start token indices or null
std::string to_canonical_line(const DocumentRecord& doc);
DocumentRecord from_canonical_line(std::string_view line);

std::string write_canonical_string(const Corpus& corpus);
Corpus read_canonical_string(std::string_view contents, std::string name = {});

void write_canonical(const std::string& path, const Corpus& corpus);
Corpus read_canonical(const std::string& path);

}  // namespace rstkit
