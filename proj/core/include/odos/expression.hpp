#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace odos {

// Small arithmetic expression over named variables: numbers, + - * / ^,
// parentheses, unary minus and the functions exp, log, sqrt, abs, tanh.
// Compiled once, evaluated per parameter draw.
class Expression {
 public:
  static Expression compile(const std::string& source, std::vector<std::string> variables);

  double eval(std::span<const double> values) const;
  const std::string& source() const { return source_; }
  std::size_t n_variables() const { return n_variables_; }

  struct Node;

 private:
  Expression(std::shared_ptr<const Node> root, std::string source, std::size_t n_variables)
      : root_(std::move(root)), source_(std::move(source)), n_variables_(n_variables) {}

  std::shared_ptr<const Node> root_;
  std::string source_;
  std::size_t n_variables_ = 0;
};

}  // namespace odos
