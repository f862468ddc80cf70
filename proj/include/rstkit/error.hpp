#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rstkit {

enum class ErrorKind {
  NonBinaryNode,
  NonContiguousChildren,
  DuplicateLeaf,
  MissingTree,
  MalformedXml,
  DanglingParentId,
  UnknownRelname,
  EmptySegmentText,
  UnaryChain,
  SchemaViolation,
  UnknownLabel,
  ParseError,
  DimensionMismatch,
  EmptyDataset,
  ProviderLengthMismatch,
  MissingScore,
  NonPositiveLoss,
  NaNLoss,
  SpanRangeMismatch,
  NotAPartition,
  MissingSentences,
  InvalidArgument,
  Io,
};

std::string_view error_kind_name(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (and the CLI)
// can report it in a stable, machine-parsable form.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rstkit
