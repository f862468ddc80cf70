#include <algorithm>

#include "rstkit/segmenter.hpp"
#include "rstkit/tokenize.hpp"

namespace rstkit {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::string punct_class(std::string_view token) {
  bool all_punct = !token.empty();
  for (std::size_t pos = 0; all_punct && pos < token.size();) all_punct = is_punct(next_code_point(token, pos));
  if (!all_punct) return "word";
  if (token == "," || token == "\xEF\xBC\x8C" || token == "\xD8\x8C") return "comma";
  if (token == "." || token == "!" || token == "?" || token == "..." || token == "\xE2\x80\xA6") return "final";
  if (token == ":" || token == ";") return "colon";
  if (token == "-" || token == "--" || token == "\xE2\x80\x93" || token == "\xE2\x80\x94") return "dash";
  if (token == "(" || token == ")" || token == "[" || token == "]") return "bracket";
  if (token == "\"" || token == "'" || token == "\xC2\xAB" || token == "\xC2\xBB" || token == "\xE2\x80\x9C" ||
      token == "\xE2\x80\x9D")
    return "quote";
  return "other";
}

}  // namespace

HashedWindowFeatures::HashedWindowFeatures(int bits) : bits_(bits) {
  if (bits < 4 || bits > 24) throw Error(ErrorKind::InvalidArgument, "hash bits must be in [4, 24]");
}

std::string HashedWindowFeatures::config() const { return "hashed-window bits=" + std::to_string(bits_); }

std::vector<std::string> HashedWindowFeatures::feature_names(std::span<const Token> tokens,
                                                             std::size_t t) const {
  const auto word = [&](std::ptrdiff_t i) -> std::string {
    if (i < 0) return "<s>";
    if (i >= static_cast<std::ptrdiff_t>(tokens.size())) return "</s>";
    return to_lower(tokens[static_cast<std::size_t>(i)].text);
  };
  const auto cls = [&](std::ptrdiff_t i) -> std::string {
    if (i < 0) return "<s>";
    if (i >= static_cast<std::ptrdiff_t>(tokens.size())) return "</s>";
    return punct_class(tokens[static_cast<std::size_t>(i)].text);
  };
  const auto i = static_cast<std::ptrdiff_t>(t);
  std::vector<std::string> f;
  f.push_back("bias");
  f.push_back("w0=" + word(i));
  f.push_back("w-1=" + word(i - 1));
  f.push_back("w+1=" + word(i + 1));
  f.push_back("p0=" + cls(i));
  f.push_back("p-1=" + cls(i - 1));
  f.push_back("p-1|w0=" + cls(i - 1) + "|" + word(i));
  if (cls(i) == "comma") f.push_back("comma0");
  if (cls(i - 1) == "comma") f.push_back("comma-1");
  if (t == 0) f.push_back("doc-start");
  return f;
}

SparseFeatures HashedWindowFeatures::extract(std::span<const Token> tokens) const {
  const Eigen::Index dim = dimension();
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t t = 0; t < tokens.size(); ++t)
    for (const auto& name : feature_names(tokens, t))
      triplets.emplace_back(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(fnv1a(name) & (dim - 1)), 1.0);
  SparseFeatures x(static_cast<Eigen::Index>(tokens.size()), dim);
  // Colliding features add up.
  x.setFromTriplets(triplets.begin(), triplets.end());
  return x;
}

DenseCallbackFeatures::DenseCallbackFeatures(Eigen::Index dimension, Callback callback, std::string name)
    : dimension_(dimension), callback_(std::move(callback)), name_(std::move(name)) {}

SparseFeatures DenseCallbackFeatures::extract(std::span<const Token> tokens) const {
  Eigen::MatrixXd dense = callback_(tokens);
  if (dense.rows() != static_cast<Eigen::Index>(tokens.size()) || dense.cols() != dimension_)
    throw Error(ErrorKind::DimensionMismatch, "dense feature callback returned the wrong shape");
  return dense.sparseView();
}

}  // namespace rstkit
