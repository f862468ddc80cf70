#include "rstkit/tokenize.hpp"

namespace rstkit {

char32_t next_code_point(std::string_view text, std::size_t& pos) {
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
  const unsigned char lead = byte(pos);
  std::size_t len = 0;
  char32_t cp = 0;
  if (lead < 0x80) {
    ++pos;
    return lead;
  } else if ((lead & 0xE0) == 0xC0) {
    len = 2;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4;
    cp = lead & 0x07;
  } else {
    ++pos;
    return 0xFFFD;
  }
  if (pos + len > text.size()) {
    ++pos;
    return 0xFFFD;
  }
  for (std::size_t i = 1; i < len; ++i) {
    const unsigned char c = byte(pos + i);
    if ((c & 0xC0) != 0x80) {
      ++pos;
      return 0xFFFD;
    }
    cp = (cp << 6) | (c & 0x3F);
  }
  pos += len;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v' ||
         cp == 0x00A0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 ||
         cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000;
}

bool is_punct(char32_t cp) {
  if (cp < 0x80)
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) || (cp >= 0x5B && cp <= 0x60) ||
           (cp >= 0x7B && cp <= 0x7E);
  if (cp >= 0x00A1 && cp <= 0x00BF)
    return cp != 0x00AA && cp != 0x00B2 && cp != 0x00B3 && cp != 0x00B5 && cp != 0x00B9 &&
           cp != 0x00BA && cp != 0x00BC && cp != 0x00BD && cp != 0x00BE;
  if (cp == 0x00D7 || cp == 0x00F7) return true;
  if ((cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E)) return true;
  if (cp >= 0x3001 && cp <= 0x303F) return true;
  if ((cp >= 0xFF01 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) || (cp >= 0xFF3B && cp <= 0xFF40) ||
      (cp >= 0xFF5B && cp <= 0xFF65))
    return true;
  return false;
}

bool has_cyrillic(std::string_view text) {
  for (std::size_t pos = 0; pos < text.size();) {
    const char32_t cp = next_code_point(text, pos);
    if (cp >= 0x0400 && cp <= 0x04FF) return true;
  }
  return false;
}

std::string to_lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size();) {
    char32_t cp = next_code_point(text, pos);
    if (cp >= 'A' && cp <= 'Z')
      cp += 0x20;
    else if ((cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7))
      cp += 0x20;
    else if (cp >= 0x0410 && cp <= 0x042F)
      cp += 0x20;
    else if (cp >= 0x0400 && cp <= 0x040F)
      cp += 0x50;
    append_utf8(out, cp);
  }
  return out;
}

std::string_view strip_bom(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  return text;
}

namespace {

struct CodePoint {
  char32_t value;
  std::size_t begin;
  std::size_t end;
};

void split_chunk(std::string_view chunk, std::vector<std::string>& out) {
  std::vector<CodePoint> cps;
  for (std::size_t pos = 0; pos < chunk.size();) {
    const std::size_t begin = pos;
    const char32_t cp = next_code_point(chunk, pos);
    cps.push_back({cp, begin, pos});
  }
  std::size_t lo = 0;
  std::size_t hi = cps.size();
  bool all_punct = true;
  for (const auto& c : cps) all_punct = all_punct && is_punct(c.value);
  if (all_punct) {
    out.emplace_back(chunk);
    return;
  }
  while (lo < hi && is_punct(cps[lo].value)) {
    out.emplace_back(chunk.substr(cps[lo].begin, cps[lo].end - cps[lo].begin));
    ++lo;
  }
  std::vector<std::string> tail;
  while (hi > lo && is_punct(cps[hi - 1].value)) {
    tail.emplace_back(chunk.substr(cps[hi - 1].begin, cps[hi - 1].end - cps[hi - 1].begin));
    --hi;
  }
  out.emplace_back(chunk.substr(cps[lo].begin, cps[hi - 1].end - cps[lo].begin));
  out.insert(out.end(), tail.rbegin(), tail.rend());
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t chunk_start = std::string_view::npos;
  for (std::size_t pos = 0; pos < text.size();) {
    const std::size_t begin = pos;
    const char32_t cp = next_code_point(text, pos);
    if (is_space(cp)) {
      if (chunk_start != std::string_view::npos) {
        split_chunk(text.substr(chunk_start, begin - chunk_start), out);
        chunk_start = std::string_view::npos;
      }
    } else if (chunk_start == std::string_view::npos) {
      chunk_start = begin;
    }
  }
  if (chunk_start != std::string_view::npos) split_chunk(text.substr(chunk_start), out);
  return out;
}

}  // namespace rstkit
