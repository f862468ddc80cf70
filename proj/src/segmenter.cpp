#include "rstkit/segmenter.hpp"

#include <charconv>
#include <iomanip>
#include <sstream>

#include "rstkit/treebank_io.hpp"

namespace rstkit {

std::vector<EduSpan> labels_to_edus(std::span<const int> labels) {
  std::vector<EduSpan> edus;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (t == 0 || labels[t] == kBoundary) {
      if (!edus.empty()) edus.back().last = t - 1;
      edus.push_back({t, t});
    }
  }
  if (!edus.empty()) edus.back().last = labels.size() - 1;
  return edus;
}

crf::LabelSequence edus_to_labels(std::span<const EduSpan> edus, std::size_t token_count) {
  if (!is_partition(edus, token_count))
    throw Error(ErrorKind::NotAPartition, "EDUs do not partition " + std::to_string(token_count) + " tokens");
  crf::LabelSequence labels(token_count, kInside);
  for (const auto& e : edus) labels[e.first] = kBoundary;
  return labels;
}

std::vector<TrainingSequence> make_dataset(const Corpus& corpus, const FeatureExtractor& extractor) {
  std::vector<TrainingSequence> data;
  for (const auto& doc : corpus.documents) {
    if (doc.tokens.empty()) continue;
    data.push_back({extractor.extract(doc.tokens), edus_to_labels(doc.edus, doc.tokens.size())});
  }
  return data;
}

crf::LabelSequence Segmenter::label(std::span<const Token> tokens) const {
  if (tokens.empty()) return {};
  return crf::viterbi(model, HashedWindowFeatures(hash_bits).extract(tokens));
}

std::vector<EduSpan> Segmenter::segment(std::span<const Token> tokens) const {
  const auto labels = label(tokens);
  return labels_to_edus(labels);
}

std::string serialize_segmenter(const Segmenter& seg) {
  const auto& m = seg.model;
  m.validate();
  std::ostringstream out;
  out << std::setprecision(17);
  out << "rstkit-crf 1\n";
  out << "extractor hashed-window bits=" << seg.hash_bits << "\n";
  out << "labels " << m.num_labels();
  for (const auto& l : m.labels) out << ' ' << l;
  out << "\nfeatures " << m.feature_dim() << "\n";
  const auto row = [&](const char* name, const auto& v) {
    out << name;
    for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << v(i);
    out << '\n';
  };
  row("start", m.start);
  row("stop", m.stop);
  out << "transition";
  for (Eigen::Index a = 0; a < m.num_labels(); ++a)
    for (Eigen::Index b = 0; b < m.num_labels(); ++b) out << ' ' << m.transition(a, b);
  out << '\n';
  std::size_t nnz = 0;
  for (Eigen::Index r = 0; r < m.emission.rows(); ++r)
    for (Eigen::Index c = 0; c < m.emission.cols(); ++c) nnz += m.emission(r, c) != 0.0;
  out << "emission " << nnz << '\n';
  for (Eigen::Index r = 0; r < m.emission.rows(); ++r)
    for (Eigen::Index c = 0; c < m.emission.cols(); ++c)
      if (m.emission(r, c) != 0.0) out << r << ' ' << c << ' ' << m.emission(r, c) << '\n';
  return out.str();
}

namespace {

class ModelReader {
 public:
  explicit ModelReader(std::string_view text) : in_(std::string(text)) {}

  void expect(const std::string& word) {
    std::string got;
    if (!(in_ >> got) || got != word) fail("expected '" + word + "'");
  }
  template <typename T>
  T read() {
    T value{};
    if (!(in_ >> value)) fail("malformed number");
    return value;
  }
  std::string word() {
    std::string w;
    if (!(in_ >> w)) fail("unexpected end of model");
    return w;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw Error(ErrorKind::ParseError, "segmenter model: " + what);
  }

 private:
  std::istringstream in_;
};

}  // namespace

Segmenter parse_segmenter(std::string_view text) {
  ModelReader r(text);
  r.expect("rstkit-crf");
  if (r.read<int>() != 1) r.fail("unsupported version");
  r.expect("extractor");
  r.expect("hashed-window");
  const std::string bits = r.word();
  if (!bits.starts_with("bits=")) r.fail("missing bits=");
  Segmenter seg;
  seg.hash_bits = std::stoi(bits.substr(5));
  r.expect("labels");
  const auto L = r.read<Eigen::Index>();
  if (L < 2) r.fail("fewer than two labels");
  std::vector<std::string> labels;
  for (Eigen::Index i = 0; i < L; ++i) labels.push_back(r.word());
  r.expect("features");
  const auto D = r.read<Eigen::Index>();
  if (D != (Eigen::Index{1} << seg.hash_bits)) r.fail("feature dimension disagrees with hash bits");
  SegmenterModel m(L, D);
  m.labels = labels;
  r.expect("start");
  for (Eigen::Index i = 0; i < L; ++i) m.start(i) = r.read<double>();
  r.expect("stop");
  for (Eigen::Index i = 0; i < L; ++i) m.stop(i) = r.read<double>();
  r.expect("transition");
  for (Eigen::Index a = 0; a < L; ++a)
    for (Eigen::Index b = 0; b < L; ++b) m.transition(a, b) = r.read<double>();
  r.expect("emission");
  const auto nnz = r.read<std::size_t>();
  for (std::size_t k = 0; k < nnz; ++k) {
    const auto row = r.read<Eigen::Index>();
    const auto col = r.read<Eigen::Index>();
    const auto value = r.read<double>();
    if (row < 0 || row >= L || col < 0 || col >= D) r.fail("emission entry out of range");
    m.emission(row, col) = value;
  }
  m.validate();
  seg.model = std::move(m);
  return seg;
}

void save_segmenter(const std::string& path, const Segmenter& segmenter) {
  write_file(path, serialize_segmenter(segmenter));
}

Segmenter load_segmenter(const std::string& path) { return parse_segmenter(read_file(path)); }

}  // namespace rstkit
