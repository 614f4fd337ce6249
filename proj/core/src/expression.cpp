#include "odos/expression.hpp"

#include <cctype>
#include <cmath>
#include <functional>

#include "odos/error.hpp"

namespace odos {

struct Expression::Node {
  enum class Kind { Constant, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
  Kind kind;
  double constant = 0.0;
  std::size_t variable = 0;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> left;
  std::shared_ptr<const Node> right;

  double eval(std::span<const double> values) const {
    switch (kind) {
      case Kind::Constant: return constant;
      case Kind::Variable: return values[variable];
      case Kind::Negate: return -left->eval(values);
      case Kind::Add: return left->eval(values) + right->eval(values);
      case Kind::Sub: return left->eval(values) - right->eval(values);
      case Kind::Mul: return left->eval(values) * right->eval(values);
      case Kind::Div: return left->eval(values) / right->eval(values);
      case Kind::Pow: return std::pow(left->eval(values), right->eval(values));
      case Kind::Call: return fn(left->eval(values));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make_binary(Node::Kind kind, NodePtr l, NodePtr r) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->left = std::move(l);
  n->right = std::move(r);
  return n;
}

struct Parser {
  const std::string& src;
  const std::vector<std::string>& variables;
  std::size_t pos = 0;

  [[noreturn]] void error(const std::string& message) const {
    fail(ErrorCode::ParseError,
         "expression '" + src + "' at position " + std::to_string(pos) + ": " + message);
  }

  void skip_space() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool consume(char c) {
    skip_space();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_space();
    return pos < src.size() ? src[pos] : '\0';
  }

  NodePtr parse_expression() {
    NodePtr left = parse_term();
    for (;;) {
      if (consume('+')) {
        left = make_binary(Node::Kind::Add, left, parse_term());
      } else if (consume('-')) {
        left = make_binary(Node::Kind::Sub, left, parse_term());
      } else {
        return left;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr left = parse_power();
    for (;;) {
      if (consume('*')) {
        left = make_binary(Node::Kind::Mul, left, parse_power());
      } else if (consume('/')) {
        left = make_binary(Node::Kind::Div, left, parse_power());
      } else {
        return left;
      }
    }
  }

  NodePtr parse_power() {
    NodePtr base = parse_unary();
    if (consume('^')) {
      return make_binary(Node::Kind::Pow, base, parse_power());  // right-associative
    }
    return base;
  }

  NodePtr parse_unary() {
    if (consume('-')) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Negate;
      n->left = parse_unary();
      return n;
    }
    return parse_primary();
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos >= src.size()) error("unexpected end of input");
    const char c = src[pos];
    if (c == '(') {
      ++pos;
      NodePtr inner = parse_expression();
      if (!consume(')')) error("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    error(std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    std::size_t end = pos;
    while (end < src.size() &&
           (std::isdigit(static_cast<unsigned char>(src[end])) || src[end] == '.' ||
            src[end] == 'e' || src[end] == 'E' ||
            ((src[end] == '+' || src[end] == '-') && end > pos &&
             (src[end - 1] == 'e' || src[end - 1] == 'E')))) {
      ++end;
    }
    double value = 0.0;
    try {
      value = std::stod(src.substr(pos, end - pos));
    } catch (const std::exception&) {
      error("bad number literal");
    }
    pos = end;
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Constant;
    n->constant = value;
    return n;
  }

  NodePtr parse_identifier() {
    std::size_t end = pos;
    while (end < src.size() && (std::isalnum(static_cast<unsigned char>(src[end])) ||
                                src[end] == '_')) {
      ++end;
    }
    const std::string name = src.substr(pos, end - pos);
    pos = end;
    if (peek() == '(') {
      double (*fn)(double) = nullptr;
      if (name == "exp") fn = [](double x) { return std::exp(x); };
      else if (name == "log") fn = [](double x) { return std::log(x); };
      else if (name == "sqrt") fn = [](double x) { return std::sqrt(x); };
      else if (name == "abs") fn = [](double x) { return std::abs(x); };
      else if (name == "tanh") fn = [](double x) { return std::tanh(x); };
      else error("unknown function '" + name + "'");
      consume('(');
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Call;
      n->fn = fn;
      n->left = parse_expression();
      if (!consume(')')) error("expected ')' after function argument");
      return n;
    }
    for (std::size_t i = 0; i < variables.size(); ++i) {
      if (variables[i] == name) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::Variable;
        n->variable = i;
        return n;
      }
    }
    error("unknown variable '" + name + "'");
  }
};

}  // namespace

Expression Expression::compile(const std::string& source, std::vector<std::string> variables) {
  Parser parser{source, variables, 0};
  NodePtr root = parser.parse_expression();
  parser.skip_space();
  if (parser.pos != source.size()) parser.error("trailing input");
  return Expression(std::move(root), source, variables.size());
}

double Expression::eval(std::span<const double> values) const {
  require(values.size() >= n_variables_, ErrorCode::InvalidArgument,
          "expression evaluated with too few values");
  return root_->eval(values);
}

}  // namespace odos
