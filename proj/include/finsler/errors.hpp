#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

enum class ErrorKind {
  Boundary,
  DomainEscape,
  ConvexityViolation,
  DegenerateInput,
  InvalidBody,
  DegenerateBetterment,
  InvalidMap,
  IndefiniteMetric,
  DegeneratePlane,
  Underdetermined,
  Inconsistency,
  ConstructionInvalid,
  Usage,
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

// Raised when a flow trajectory or a path vertex leaves the chart box.
class DomainEscapeError : public Error {
public:
  DomainEscapeError(const std::string& what, double exit_time)
      : Error(ErrorKind::DomainEscape, what), exit_time_(exit_time) {}

  double exit_time() const noexcept { return exit_time_; }

private:
  double exit_time_;
};

} // namespace finsler
