#pragma once

#include <stdexcept>
#include <string>

namespace nodallab {

enum class ErrorKind {
  Domain,         // point or ball outside the field domain
  Argument,       // malformed call arguments
  Precondition,   // mathematical hypothesis not met (k <= k_bar, gamma < gamma_q, ...)
  DegenerateSphere,
  ZeroField,
  Resolution,
  Solver,
  Construction,
  Inconclusive,
  Parse,
  Version,
  Data,
  Io,             // file cannot be opened or written
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure with the 1-based line number of the offending input line
/// (0 when the problem is not tied to a line, e.g. a missing section).
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, std::size_t line, const std::string& what)
      : Error(kind, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An estimator could only bracket the answer.
class InconclusiveError : public Error {
 public:
  InconclusiveError(const std::string& what, double lower, double upper)
      : Error(ErrorKind::Inconclusive, what), lower_(lower), upper_(upper) {}

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

 private:
  double lower_;
  double upper_;
};

}  // namespace nodallab
