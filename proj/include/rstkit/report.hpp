#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "rstkit/eval.hpp"

namespace rstkit {

// A small table rendered either as aligned text or as CSV.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row);
  std::string text() const;
  std::string csv() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string percent(double value);  // one decimal
std::string fixed(double value, int decimals);

Table stats_table(const std::map<std::string, CorpusStats>& rows);
Table parseval_table(const std::map<std::string, ParsevalScores>& rows, std::span<const Metric> metrics,
                     const std::map<std::string, SegScores>* segmentation = nullptr);

}  // namespace rstkit
