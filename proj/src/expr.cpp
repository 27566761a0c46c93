#include "finsler/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

namespace finsler {

struct Expression::Node {
  enum class Op { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Sqrt } op;
  double value = 0.0;
  int variable = 0;
  std::shared_ptr<const Node> lhs, rhs;

  double eval(const Vector& x) const {
    switch (op) {
    case Op::Constant: return value;
    case Op::Variable: return x[variable];
    case Op::Add: return lhs->eval(x) + rhs->eval(x);
    case Op::Sub: return lhs->eval(x) - rhs->eval(x);
    case Op::Mul: return lhs->eval(x) * rhs->eval(x);
    case Op::Div: return lhs->eval(x) / rhs->eval(x);
    case Op::Pow: {
      const double e = rhs->eval(x);
      if (e == std::round(e) && std::abs(e) <= 16) {
        const double b = lhs->eval(x);
        double r = 1.0;
        for (int i = 0; i < std::abs(static_cast<int>(e)); ++i) r *= b;
        return e < 0 ? 1.0 / r : r;
      }
      return std::pow(lhs->eval(x), e);
    }
    case Op::Neg: return -lhs->eval(x);
    case Op::Sin: return std::sin(lhs->eval(x));
    case Op::Cos: return std::cos(lhs->eval(x));
    case Op::Exp: return std::exp(lhs->eval(x));
    case Op::Sqrt: return std::sqrt(lhs->eval(x));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

class Parser {
public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expression();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return e;
  }

  int max_variable = 0;

private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::Usage,
                "expression '" + s_ + "': " + what + " at position " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr make(Op op, NodePtr l = nullptr, NodePtr r = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  NodePtr expression() {
    NodePtr left = term();
    while (true) {
      if (accept('+')) left = make(Op::Add, left, term());
      else if (accept('-')) left = make(Op::Sub, left, term());
      else return left;
    }
  }

  NodePtr term() {
    NodePtr left = unary();
    while (true) {
      if (accept('*')) left = make(Op::Mul, left, unary());
      else if (accept('/')) left = make(Op::Div, left, unary());
      else return left;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (accept('(')) {
      NodePtr e = expression();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Expression::Node>();
      n->op = Op::Constant;
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      static const std::vector<std::pair<std::string, Op>> functions = {
          {"sin", Op::Sin}, {"cos", Op::Cos}, {"exp", Op::Exp}, {"sqrt", Op::Sqrt}};
      for (const auto& [name, op] : functions) {
        if (id == name) {
          if (!accept('(')) fail("expected '(' after " + name);
          NodePtr arg = expression();
          if (!accept(')')) fail("expected ')'");
          return make(op, arg);
        }
      }
      auto n = std::make_shared<Expression::Node>();
      if (id == "pi") {
        n->op = Op::Constant;
        n->value = std::numbers::pi;
        return n;
      }
      int index = 0;
      if (id == "x" || id == "y" || id == "z" || id == "w") {
        index = id == "x" ? 1 : id == "y" ? 2 : id == "z" ? 3 : 4;
      } else if (id.size() >= 2 && id[0] == 'x' && std::all_of(id.begin() + 1, id.end(), ::isdigit)) {
        index = std::stoi(id.substr(1));
      }
      if (index < 1) {
        pos_ = start;
        fail("unknown identifier '" + id + "'");
      }
      n->op = Op::Variable;
      n->variable = index - 1;
      max_variable = std::max(max_variable, index);
      return n;
    }
    fail("unexpected character");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

} // namespace

Expression Expression::parse(const std::string& source) {
  Parser p(source);
  Expression e;
  e.root_ = p.parse();
  e.source_ = source;
  e.max_variable_ = p.max_variable;
  return e;
}

double Expression::operator()(const Vector& x) const {
  if (x.size() < max_variable_)
    throw Error(ErrorKind::DegenerateInput, "expression '" + source_ + "' needs more coordinates");
  return root_->eval(x);
}

OneFormField expression_gradient(Expression f, double h) {
  return [f = std::move(f), h](const Vector& x) -> Vector {
    Vector df(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      auto central = [&](double step) {
        Vector xp = x, xm = x;
        xp[i] += step;
        xm[i] -= step;
        return (f(xp) - f(xm)) / (2.0 * step);
      };
      df[i] = (4.0 * central(0.5 * h) - central(h)) / 3.0;
    }
    return df;
  };
}

} // namespace finsler
