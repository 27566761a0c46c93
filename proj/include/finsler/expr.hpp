#pragma once

#include <memory>
#include <string>

#include "finsler/chart.hpp"

namespace finsler {

/// Arithmetic expression over chart coordinates.
///
/// Grammar: numbers, variables x1..xN (x, y, z, w alias x1..x4), the
/// constant pi, binary + - * / ^ (right-associative power), unary minus,
/// parentheses and the functions sin, cos, exp, sqrt. Parse errors raise
/// ErrorKind::Usage with the offending position.
class Expression {
public:
  struct Node;

  static Expression parse(const std::string& source);

  double operator()(const Vector& x) const;
  // Highest variable index referenced (1-based), 0 for constants.
  int max_variable() const { return max_variable_; }
  const std::string& source() const { return source_; }

private:
  std::shared_ptr<const Node> root_;
  std::string source_;
  int max_variable_ = 0;
};

// df for a scalar expression, from Richardson-combined central differences
// with steps h and h/2.
OneFormField expression_gradient(Expression f, double h = 1e-3);

} // namespace finsler
