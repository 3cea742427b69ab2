#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ozsl {

/// Failure categories; the CLI maps them onto exit codes 1, 2 and 3.
enum class ErrorKind { Usage, Data, Numerical };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

class UsageError : public Error {
public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class DataError : public Error {
public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class NumericalError : public Error {
public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

/// Rejected ELF input. Line and column are 1-based and point inside the input.
class ParseError : public DataError {
public:
  enum class Reason { Syntax, UndeclaredName, DuplicateDeclaration, SignatureOverlap };

  ParseError(Reason reason, std::size_t line, std::size_t column, const std::string& message)
      : DataError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                  message),
        reason_(reason), line_(line), column_(column) {}
  Reason reason() const noexcept { return reason_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  Reason reason_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace ozsl
