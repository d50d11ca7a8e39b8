#include "heischar/expression.hpp"

#include <fmt/core.h>

#include <cctype>
#include <cmath>
#include <numbers>
#include <variant>
#include <vector>

namespace heischar {

struct Expression::Node {
  enum class Kind { Number, VarA, VarB, Constant, Negate, Add, Sub, Mul, Div, Pow };
  Kind kind;
  double number = 0.0;  // literal value, constant value
  std::string name;     // constant name
  int exponent = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;
using Kind = Node::Kind;

NodePtr make(Kind k, NodePtr l = {}, NodePtr r = {}) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

class Parser {
 public:
  Parser(std::string_view text, const Expression::Constants& constants)
      : text_(text), constants_(constants) {}

  NodePtr parse_all() {
    NodePtr n = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError(fmt::format("expression: {} at column {} in \"{}\"", what, pos_ + 1, text_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) {
        n = make(Kind::Add, n, term());
      } else if (accept('-')) {
        n = make(Kind::Sub, n, term());
      } else {
        return n;
      }
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) {
        n = make(Kind::Mul, n, unary());
      } else if (accept('/')) {
        n = make(Kind::Div, n, unary());
      } else {
        return n;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Negate, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (!accept('^')) return base;
    skip_space();
    bool negative = accept('-');
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("exponent must be an integer literal");
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      fail("exponent must be an integer literal");
    }
    const std::string digits(text_.substr(start, pos_ - start));
    if (digits.size() > 6) fail("exponent too large");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Pow;
    n->lhs = base;
    n->exponent = (negative ? -1 : 1) * std::stoi(digits);
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '^') fail("chained exponents need parentheses");
    return n;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = expr();
      if (!accept(')')) fail("missing ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(fmt::format("unexpected character '{}'", c));
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string lit(text_.substr(start, pos_ - start));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(lit, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != lit.size()) fail(fmt::format("malformed number '{}'", lit));
    auto n = std::make_shared<Node>();
    n->kind = Kind::Number;
    n->number = v;
    return n;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string id(text_.substr(start, pos_ - start));
    if (id == "a") return make(Kind::VarA);
    if (id == "b") return make(Kind::VarB);
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->name = id;
    if (auto it = constants_.find(id); it != constants_.end()) {
      n->number = it->second;
    } else if (id == "pi") {
      n->number = std::numbers::pi;
    } else if (id == "e") {
      n->number = std::numbers::e;
    } else {
      pos_ = start;
      fail(fmt::format("unknown identifier '{}'", id));
    }
    return n;
  }

  std::string_view text_;
  const Expression::Constants& constants_;
  std::size_t pos_ = 0;
};

double eval(const Node& n, double a, double b) {
  switch (n.kind) {
    case Kind::Number:
    case Kind::Constant: return n.number;
    case Kind::VarA: return a;
    case Kind::VarB: return b;
    case Kind::Negate: return -eval(*n.lhs, a, b);
    case Kind::Add: return eval(*n.lhs, a, b) + eval(*n.rhs, a, b);
    case Kind::Sub: return eval(*n.lhs, a, b) - eval(*n.rhs, a, b);
    case Kind::Mul: return eval(*n.lhs, a, b) * eval(*n.rhs, a, b);
    case Kind::Div: return eval(*n.lhs, a, b) / eval(*n.rhs, a, b);
    case Kind::Pow: {
      const double base = eval(*n.lhs, a, b);
      const int k = std::abs(n.exponent);
      double r = 1.0;
      for (int i = 0; i < k; ++i) r *= base;
      return n.exponent < 0 ? 1.0 / r : r;
    }
  }
  return 0.0;
}

// 1: sum, 2: product, 3: unary, 4: power, 5: atom
int level(const Node& n) {
  switch (n.kind) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Negate: return 3;
    case Kind::Pow: return 4;
    default: return 5;
  }
}

std::string print(const Node& n);

std::string wrap(const Node& n, bool paren) {
  return paren ? "(" + print(n) + ")" : print(n);
}

std::string print(const Node& n) {
  switch (n.kind) {
    case Kind::Number: return fmt::format("{}", n.number);
    case Kind::Constant: return n.name;
    case Kind::VarA: return "a";
    case Kind::VarB: return "b";
    case Kind::Negate: return "-" + wrap(*n.lhs, level(*n.lhs) < 3);
    case Kind::Pow: return wrap(*n.lhs, level(*n.lhs) < 5) + "^" + std::to_string(n.exponent);
    default: break;
  }
  const int lv = level(n);
  const char* op = n.kind == Kind::Add ? " + " : n.kind == Kind::Sub ? " - " : n.kind == Kind::Mul ? " * " : " / ";
  return wrap(*n.lhs, level(*n.lhs) < lv) + op + wrap(*n.rhs, level(*n.rhs) <= lv);
}

bool has_vars(const Node& n) {
  if (n.kind == Kind::VarA || n.kind == Kind::VarB) return true;
  return (n.lhs && has_vars(*n.lhs)) || (n.rhs && has_vars(*n.rhs));
}

}  // namespace

Expression Expression::parse(std::string_view text, const Constants& constants) {
  return Expression(Parser(text, constants).parse_all());
}

double Expression::evaluate(double a, double b) const { return eval(*root_, a, b); }

std::string Expression::to_string() const { return print(*root_); }

bool Expression::uses_variables() const { return has_vars(*root_); }

PlanarField expression_field(const Expression& expr, const Box<2>& box) {
  return PlanarField([expr](const Vec2& w) { return expr.evaluate(w[0], w[1]); }, box);
}

}  // namespace heischar
