#pragma once

// Scalar expression mini-language in the single variable `s`.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          (right associative)
//   primary := number | 's' | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Functions: ln exp abs sin cos atan sqrt sign (one argument), min max (two).
// sign(0) = 0.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace dincl {

enum class Op { Literal, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Ln, Exp, Abs, Sin, Cos, Atan, Sqrt, Sign, Min, Max };

const char* func_name(Func f);
int func_arity(Func f);

class Expr {
 public:
  struct Node;

  static Expr literal(double value);  // value must be finite and >= 0
  static Expr var();
  static Expr negate(Expr operand);
  static Expr binary(Op op, Expr lhs, Expr rhs);
  static Expr call(Func f, std::vector<Expr> args);

  Op op() const;
  double value() const;  // Literal only
  Func func() const;     // Call only
  const std::vector<Expr>& args() const;

  double operator()(double s) const;

  // Fully parenthesized text that parses back to the same tree.
  std::string str() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Expr parse_expr(std::string_view text);
double eval_expr(const Expr& e, double s);

}  // namespace dincl
