#pragma once

#include <map>
#include <string>
#include <string_view>
#include <tuple>

#include "rstkit/decoder.hpp"

namespace rstkit {

// Decision scores dumped by an external model, keyed by document id.
//
//   #rstkit-scores 1
//   labels <merged label> ...
//   split <doc> <begin> <end> <v_0> ... <v_{end-begin-2}>
//   label <doc> <begin> <mid> <end> <v_0> ... <v_{L-1}>
//
// Ranges are half-open EDU index ranges; a label line scores the children
// [begin, mid) and [mid, end). Fields are separated by whitespace.
struct DocumentScores {
  std::map<EduRange, Eigen::VectorXd> splits;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Eigen::VectorXd> labels;
};

struct ScoreTable {
  LabelInventory labels;
  std::map<std::string, DocumentScores> documents;
};

ScoreTable parse_score_file(std::string_view text);
ScoreTable load_score_file(const std::string& path);
std::string format_score_file(const ScoreTable& table);

// Serves one document's scores; a query with no entry raises MissingScore.
class TableScoreProvider final : public ScoreProvider {
 public:
  TableScoreProvider(const ScoreTable& table, const std::string& doc_id);

  Eigen::VectorXd split_scores(EduRange range) const override;
  Eigen::VectorXd label_scores(EduRange left, EduRange right) const override;

 private:
  const DocumentScores* scores_;
  std::string doc_id_;
};

// Records every split and label query of a provider over n EDUs (all
// ranges), e.g. to turn an in-memory provider into a score file.
DocumentScores dump_scores(const ScoreProvider& provider, std::size_t n, std::size_t label_count);

}  // namespace rstkit
