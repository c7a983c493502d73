#pragma once

#include <stdexcept>
#include <string>

namespace edrvfl {

// Stable numeric identifiers; mirrored by the C API status codes.
enum class ErrorCode : int {
  InvalidArgument = 1,
  DimensionMismatch = 2,
  SingularSystem = 3,
  NegativeWeight = 4,
  EmptyMatrix = 5,
  StatsNotFitted = 6,
  ParseError = 7,
  MissingLabelColumn = 8,
  SingleClass = 9,
  ClassTooSmall = 10,
  ClassAbsent = 11,
  DepthOutOfRange = 12,
  LengthMismatch = 13,
  IncompleteMatrix = 14,
  TooFewPairs = 15,
  IoError = 16,
  FormatVersionMismatch = 17,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define EDRVFL_DEFINE_ERROR(NAME)                       \
  struct NAME : Error {                                 \
    explicit NAME(const std::string& message)           \
        : Error(ErrorCode::NAME, message) {}            \
  }

EDRVFL_DEFINE_ERROR(InvalidArgument);
EDRVFL_DEFINE_ERROR(DimensionMismatch);
EDRVFL_DEFINE_ERROR(SingularSystem);
EDRVFL_DEFINE_ERROR(NegativeWeight);
EDRVFL_DEFINE_ERROR(EmptyMatrix);
EDRVFL_DEFINE_ERROR(StatsNotFitted);
EDRVFL_DEFINE_ERROR(MissingLabelColumn);
EDRVFL_DEFINE_ERROR(SingleClass);
EDRVFL_DEFINE_ERROR(ClassTooSmall);
EDRVFL_DEFINE_ERROR(ClassAbsent);
EDRVFL_DEFINE_ERROR(DepthOutOfRange);
EDRVFL_DEFINE_ERROR(LengthMismatch);
EDRVFL_DEFINE_ERROR(IncompleteMatrix);
EDRVFL_DEFINE_ERROR(TooFewPairs);
EDRVFL_DEFINE_ERROR(IoError);
EDRVFL_DEFINE_ERROR(FormatVersionMismatch);

#undef EDRVFL_DEFINE_ERROR

// Carries the 0-based data row and column where parsing failed.
struct ParseError : Error {
  ParseError(long row, long col, const std::string& message)
      : Error(ErrorCode::ParseError,
              "parse error at row " + std::to_string(row) + ", column " +
                  std::to_string(col) + ": " + message),
        row(row),
        col(col) {}
  explicit ParseError(const std::string& message)
      : Error(ErrorCode::ParseError, message), row(-1), col(-1) {}
  long row;
  long col;
};

}  // namespace edrvfl
