#pragma once

#include <memory>
#include <string>

namespace rayleigh {

// Arithmetic over the variables x, y, a with sin/cos/exp, pi, and the four
// operators. Parse errors throw std::invalid_argument with the position.
class Expression {
 public:
  struct Node;

  static Expression parse(const std::string& text);
  double operator()(double x, double y = 0.0, double a = 0.0) const;

 private:
  Expression() = default;
  std::shared_ptr<const Node> root_;
};

}  // namespace rayleigh
