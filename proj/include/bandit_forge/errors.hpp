#pragma once

#include <stdexcept>
#include <string>

namespace bforge {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define BFORGE_DEFINE_ERROR(Name)            \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

BFORGE_DEFINE_ERROR(OneClassData);
BFORGE_DEFINE_ERROR(DimensionMismatch);
BFORGE_DEFINE_ERROR(InvalidArgument);
BFORGE_DEFINE_ERROR(EmptyPool);
BFORGE_DEFINE_ERROR(SchemeMismatch);
BFORGE_DEFINE_ERROR(ArmOutOfRange);
BFORGE_DEFINE_ERROR(LengthMismatch);
BFORGE_DEFINE_ERROR(CovarianceNotPSD);
BFORGE_DEFINE_ERROR(SubsetTooLarge);

// Dataset parsing. Line numbers are 1-based and count the header.
BFORGE_DEFINE_ERROR(ParseError);

class HeaderMalformed : public ParseError {
 public:
  using ParseError::ParseError;
};

class LineError : public ParseError {
 public:
  LineError(const std::string& what, std::size_t line)
      : ParseError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IndexOutOfRange : public LineError {
 public:
  using LineError::LineError;
};

class ValueUnparsable : public LineError {
 public:
  using LineError::LineError;
};

class RowCountMismatch : public ParseError {
 public:
  using ParseError::ParseError;
};

#undef BFORGE_DEFINE_ERROR

}  // namespace bforge
