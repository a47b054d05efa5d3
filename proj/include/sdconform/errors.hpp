#ifndef SDCONFORM_ERRORS_HPP
#define SDCONFORM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sdconform {

// Stable error categories; the C API and the CLI exit codes map onto these.
enum class ErrorCode {
  Parse,
  Validation,
  UnsupportedOperator,
  AtomBudgetExceeded,
  SizeBudgetExceeded,
  SearchBudgetExceeded,
  NestedCritical,
  InvalidHiddenSet,
  InvalidArgument,
  Io,
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

class ParseError : public Error {
public:
  explicit ParseError(std::string message)
      : Error(ErrorCode::Parse, std::move(message)) {}
};

class ValidationError : public Error {
public:
  explicit ValidationError(std::string message)
      : Error(ErrorCode::Validation, std::move(message)) {}
};

class UnsupportedOperatorError : public Error {
public:
  explicit UnsupportedOperatorError(std::string message)
      : Error(ErrorCode::UnsupportedOperator, std::move(message)) {}
};

class AtomBudgetExceeded : public Error {
public:
  explicit AtomBudgetExceeded(std::string message)
      : Error(ErrorCode::AtomBudgetExceeded, std::move(message)) {}
};

class SizeBudgetExceeded : public Error {
public:
  explicit SizeBudgetExceeded(std::string message)
      : Error(ErrorCode::SizeBudgetExceeded, std::move(message)) {}
};

class SearchBudgetExceeded : public Error {
public:
  explicit SearchBudgetExceeded(std::string message)
      : Error(ErrorCode::SearchBudgetExceeded, std::move(message)) {}
};

class NestedCriticalError : public Error {
public:
  explicit NestedCriticalError(std::string message)
      : Error(ErrorCode::NestedCritical, std::move(message)) {}
};

class InvalidHiddenSetError : public Error {
public:
  explicit InvalidHiddenSetError(std::string message)
      : Error(ErrorCode::InvalidHiddenSet, std::move(message)) {}
};

} // namespace sdconform

#endif
