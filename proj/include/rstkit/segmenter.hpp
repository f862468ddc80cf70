#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "rstkit/core.hpp"
#include "rstkit/crf.hpp"

namespace rstkit {

using SparseFeatures = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Maps a token sequence to a seq_len x dimension feature matrix.
// Implementations are deterministic for a fixed configuration.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual Eigen::Index dimension() const = 0;
  virtual SparseFeatures extract(std::span<const Token> tokens) const = 0;
  // One-line description stored with trained models.
  virtual std::string config() const = 0;
};

// Hashed lexical window: bias, current/previous/next lowercased word,
// punctuation class of the current and previous token, comma flags and a
// document-start flag, each hashed (FNV-1a) into 2^bits buckets.
class HashedWindowFeatures final : public FeatureExtractor {
 public:
  explicit HashedWindowFeatures(int bits = 16);

  Eigen::Index dimension() const override { return Eigen::Index{1} << bits_; }
  SparseFeatures extract(std::span<const Token> tokens) const override;
  std::string config() const override;
  int bits() const { return bits_; }

  // Feature strings for one position, before hashing.
  std::vector<std::string> feature_names(std::span<const Token> tokens, std::size_t position) const;

 private:
  int bits_;
};

// Hook for externally computed dense vectors (e.g. encoder states).
class DenseCallbackFeatures final : public FeatureExtractor {
 public:
  using Callback = std::function<Eigen::MatrixXd(std::span<const Token>)>;
  DenseCallbackFeatures(Eigen::Index dimension, Callback callback, std::string name = "dense-callback");

  Eigen::Index dimension() const override { return dimension_; }
  SparseFeatures extract(std::span<const Token> tokens) const override;
  std::string config() const override { return name_; }

 private:
  Eigen::Index dimension_;
  Callback callback_;
  std::string name_;
};

std::uint64_t fnv1a(std::string_view text);

inline constexpr int kBoundary = 0;  // B
inline constexpr int kInside = 1;    // I

// EDUs start at every B and at token 0 whatever its label.
std::vector<EduSpan> labels_to_edus(std::span<const int> labels);
crf::LabelSequence edus_to_labels(std::span<const EduSpan> edus, std::size_t token_count);

using SegmenterModel = crf::CrfModel<double>;
using TrainingSequence = crf::Sequence<SparseFeatures>;

std::vector<TrainingSequence> make_dataset(const Corpus& corpus, const FeatureExtractor& extractor);

// Trained CRF plus the extractor configuration it was trained with.
struct Segmenter {
  SegmenterModel model;
  int hash_bits = 16;

  std::vector<EduSpan> segment(std::span<const Token> tokens) const;
  crf::LabelSequence label(std::span<const Token> tokens) const;
};

// Versioned text layout:
//   rstkit-crf 1
//   extractor hashed-window bits=<b>
//   labels <L> <name>...
//   features <D>
//   start <L values>
//   stop <L values>
//   transition <L*L values, row-major>
//   emission <nnz>            followed by nnz lines "<row> <col> <value>",
//                             row-major order, zero weights omitted
// Values are printed with 17 significant digits so doubles round-trip.
std::string serialize_segmenter(const Segmenter& segmenter);
Segmenter parse_segmenter(std::string_view text);
void save_segmenter(const std::string& path, const Segmenter& segmenter);
Segmenter load_segmenter(const std::string& path);

}  // namespace rstkit
