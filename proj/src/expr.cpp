#include "rayleigh/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace rayleigh {

struct Expression::Node {
  enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Sin, Cos, Exp };
  Op op = Op::Const;
  double value = 0.0;
  int var = 0;  // 0 = x, 1 = y, 2 = a
  std::shared_ptr<const Node> lhs, rhs;

  double eval(double x, double y, double a) const {
    switch (op) {
      case Op::Const: return value;
      case Op::Var: return var == 0 ? x : (var == 1 ? y : a);
      case Op::Add: return lhs->eval(x, y, a) + rhs->eval(x, y, a);
      case Op::Sub: return lhs->eval(x, y, a) - rhs->eval(x, y, a);
      case Op::Mul: return lhs->eval(x, y, a) * rhs->eval(x, y, a);
      case Op::Div: return lhs->eval(x, y, a) / rhs->eval(x, y, a);
      case Op::Neg: return -lhs->eval(x, y, a);
      case Op::Sin: return std::sin(lhs->eval(x, y, a));
      case Op::Cos: return std::cos(lhs->eval(x, y, a));
      case Op::Exp: return std::exp(lhs->eval(x, y, a));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

struct Parser {
  const std::string& s;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("expression error at position " + std::to_string(pos) + ": " +
                                what);
  }

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  NodePtr make(Expression::Node n) { return std::make_shared<Expression::Node>(std::move(n)); }

  NodePtr expression() {
    NodePtr left = term();
    for (;;) {
      if (eat('+'))
        left = make({Expression::Node::Op::Add, 0, 0, left, term()});
      else if (eat('-'))
        left = make({Expression::Node::Op::Sub, 0, 0, left, term()});
      else
        return left;
    }
  }

  NodePtr term() {
    NodePtr left = unary();
    for (;;) {
      if (eat('*'))
        left = make({Expression::Node::Op::Mul, 0, 0, left, unary()});
      else if (eat('/'))
        left = make({Expression::Node::Op::Div, 0, 0, left, unary()});
      else
        return left;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make({Expression::Node::Op::Neg, 0, 0, unary(), nullptr});
    if (eat('+')) return unary();
    return primary();
  }

  NodePtr primary() {
    skip();
    if (pos >= s.size()) fail("unexpected end of input");
    const char c = s[pos];
    if (c == '(') {
      ++pos;
      NodePtr inner = expression();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end = nullptr;
      const double v = std::strtod(s.c_str() + pos, &end);
      if (end == s.c_str() + pos) fail("bad number");
      pos = static_cast<std::size_t>(end - s.c_str());
      return make({Expression::Node::Op::Const, v, 0, nullptr, nullptr});
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos;
      while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
      const std::string name = s.substr(start, pos - start);
      if (name == "pi")
        return make({Expression::Node::Op::Const, std::numbers::pi, 0, nullptr, nullptr});
      if (name == "x") return make({Expression::Node::Op::Var, 0, 0, nullptr, nullptr});
      if (name == "y") return make({Expression::Node::Op::Var, 0, 1, nullptr, nullptr});
      if (name == "a") return make({Expression::Node::Op::Var, 0, 2, nullptr, nullptr});
      Expression::Node::Op op;
      if (name == "sin")
        op = Expression::Node::Op::Sin;
      else if (name == "cos")
        op = Expression::Node::Op::Cos;
      else if (name == "exp")
        op = Expression::Node::Op::Exp;
      else
        fail("unknown name '" + name + "'");
      if (!eat('(')) fail("expected '(' after " + name);
      NodePtr arg = expression();
      if (!eat(')')) fail("expected ')'");
      return make({op, 0, 0, arg, nullptr});
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Parser p{text};
  Expression e;
  e.root_ = p.expression();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing input");
  return e;
}

double Expression::operator()(double x, double y, double a) const {
  return root_->eval(x, y, a);
}

}  // namespace rayleigh
