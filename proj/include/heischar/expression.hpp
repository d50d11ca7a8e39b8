#pragma once

// Infix arithmetic over the two planar variables.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' ['-'] integer)?
//   primary := number | identifier | '(' expr ')'
//
// Identifiers are the variables `a` (t-coordinate) and `b` (|z|^2-coordinate),
// the built-in constants `pi` and `e`, or caller-supplied named constants.
// Exponents must be integer literals.

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "heischar/scalar_field.hpp"

namespace heischar {

class Expression {
 public:
  struct Node;
  using Constants = std::map<std::string, double, std::less<>>;

  /// Throws ValidationError with the offending column on malformed input.
  static Expression parse(std::string_view text, const Constants& constants = {});

  double evaluate(double a, double b) const;
  /// Canonical minimally-parenthesized form; parse(to_string()) prints identically.
  std::string to_string() const;
  bool uses_variables() const;

 private:
  explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

/// Planar field backed by an expression; derivatives by finite differences.
PlanarField expression_field(const Expression& expr, const Box<2>& box);

}  // namespace heischar
