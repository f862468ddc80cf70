#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rstkit {

// Deterministic whitespace-plus-punctuation tokenizer, identical for every
// language. Rules, applied in order:
//   1. Split the text on Unicode whitespace (ASCII blanks, NBSP, U+1680,
//      U+2000..U+200A, U+2028, U+2029, U+202F, U+205F, U+3000).
//   2. A chunk made only of punctuation is one token ("...", "--", "?!").
//   3. Otherwise punctuation code points are peeled one by one from the start
//      and from the end of the chunk, each becoming its own token; the
//      remaining core keeps any inner punctuation ("don't", "U.S", "3.5").
// Punctuation is ASCII punctuation plus Latin-1 punctuation (U+00A1..U+00BF
// minus letters/digits), General Punctuation (U+2010..U+2027,
// U+2030..U+205E), CJK punctuation (U+3001..U+303F) and the fullwidth
// ASCII punctuation block.
std::vector<std::string> tokenize(std::string_view text);

// Decodes one UTF-8 code point starting at `pos` and advances `pos`.
// Invalid bytes decode as U+FFFD and consume one byte.
char32_t next_code_point(std::string_view text, std::size_t& pos);
void append_utf8(std::string& out, char32_t cp);

bool is_space(char32_t cp);
bool is_punct(char32_t cp);
bool has_cyrillic(std::string_view text);

// Lowercases ASCII, Latin-1 and Cyrillic letters; other code points pass.
std::string to_lower(std::string_view text);

// Strips a leading UTF-8 byte-order mark.
std::string_view strip_bom(std::string_view text);

}  // namespace rstkit
