#include "dincl/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "dincl/error.hpp"

namespace dincl {

struct Expr::Node {
  Op op = Op::Literal;
  double value = 0.0;
  Func func = Func::Ln;
  std::vector<Expr> args;
};

namespace {

struct FuncInfo {
  const char* name;
  Func func;
  int arity;
};

constexpr std::array<FuncInfo, 10> kFuncs{{
    {"ln", Func::Ln, 1},
    {"exp", Func::Exp, 1},
    {"abs", Func::Abs, 1},
    {"sin", Func::Sin, 1},
    {"cos", Func::Cos, 1},
    {"atan", Func::Atan, 1},
    {"sqrt", Func::Sqrt, 1},
    {"sign", Func::Sign, 1},
    {"min", Func::Min, 2},
    {"max", Func::Max, 2},
}};

const FuncInfo& info(Func f) {
  for (const auto& fi : kFuncs) {
    if (fi.func == f) return fi;
  }
  return kFuncs[0];
}

char op_char(Op op) {
  switch (op) {
    case Op::Add: return '+';
    case Op::Sub: return '-';
    case Op::Mul: return '*';
    case Op::Div: return '/';
    case Op::Pow: return '^';
    default: return '?';
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) {
      throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    }
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) throw ParseError(std::string("expected '") + c + "', got end of input", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(Op::Add, lhs, term());
      } else if (accept('-')) {
        lhs = Expr::binary(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(Op::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = Expr::binary(Op::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return Expr::negate(unary());
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) return Expr::binary(Op::Pow, base, unary());
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits();
      } else {
        pos_ = save;  // "2e" is not an exponent; leave 'e' for the caller to reject
      }
    }
    double v = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ParseError("malformed number", start);
    return Expr::literal(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "s") return Expr::var();
    for (const auto& fi : kFuncs) {
      if (name != fi.name) continue;
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != '(') {
        throw ParseError("function '" + std::string(name) + "' needs an argument list", pos_);
      }
      ++pos_;
      std::vector<Expr> args;
      args.push_back(expr());
      while (accept(',')) args.push_back(expr());
      expect(')');
      if (static_cast<int>(args.size()) != fi.arity) {
        throw ParseError("function '" + std::string(name) + "' takes " + std::to_string(fi.arity) +
                             " argument(s), got " + std::to_string(args.size()),
                         start);
      }
      return Expr::call(fi.func, std::move(args));
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

double checked(double v, double s, const Expr& e) {
  if (!std::isfinite(v)) throw DomainError("non-finite result", s, e.str());
  return v;
}

}  // namespace

const char* func_name(Func f) { return info(f).name; }
int func_arity(Func f) { return info(f).arity; }

Expr Expr::literal(double value) {
  if (!std::isfinite(value) || value < 0.0 || std::signbit(value)) {
    throw std::invalid_argument("expression literals must be finite and non-negative");
  }
  auto n = std::make_shared<Node>();
  n->op = Op::Literal;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::var() {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  return Expr(std::move(n));
}

Expr Expr::negate(Expr operand) {
  auto n = std::make_shared<Node>();
  n->op = Op::Neg;
  n->args.push_back(std::move(operand));
  return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  if (op_char(op) == '?') throw std::invalid_argument("not a binary operator");
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args.push_back(std::move(lhs));
  n->args.push_back(std::move(rhs));
  return Expr(std::move(n));
}

Expr Expr::call(Func f, std::vector<Expr> args) {
  if (static_cast<int>(args.size()) != func_arity(f)) throw std::invalid_argument("wrong arity");
  auto n = std::make_shared<Node>();
  n->op = Op::Call;
  n->func = f;
  n->args = std::move(args);
  return Expr(std::move(n));
}

Op Expr::op() const { return node_->op; }
double Expr::value() const { return node_->value; }
Func Expr::func() const { return node_->func; }
const std::vector<Expr>& Expr::args() const { return node_->args; }

double Expr::operator()(double s) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Literal: return n.value;
    case Op::Var: return s;
    case Op::Neg: return -n.args[0](s);
    case Op::Add: return checked(n.args[0](s) + n.args[1](s), s, *this);
    case Op::Sub: return checked(n.args[0](s) - n.args[1](s), s, *this);
    case Op::Mul: return checked(n.args[0](s) * n.args[1](s), s, *this);
    case Op::Div: {
      const double den = n.args[1](s);
      if (den == 0.0) throw DomainError("division by zero", s, str());
      return checked(n.args[0](s) / den, s, *this);
    }
    case Op::Pow: return checked(std::pow(n.args[0](s), n.args[1](s)), s, *this);
    case Op::Call: {
      const double a = n.args[0](s);
      switch (n.func) {
        case Func::Ln:
          if (a <= 0.0) throw DomainError("ln of non-positive value", s, str());
          return std::log(a);
        case Func::Exp: return checked(std::exp(a), s, *this);
        case Func::Abs: return std::abs(a);
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Atan: return std::atan(a);
        case Func::Sqrt:
          if (a < 0.0) throw DomainError("sqrt of negative value", s, str());
          return std::sqrt(a);
        case Func::Sign: return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
        case Func::Min: return std::min(a, n.args[1](s));
        case Func::Max: return std::max(a, n.args[1](s));
      }
    }
  }
  return 0.0;
}

std::string Expr::str() const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Literal: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      return buf;
    }
    case Op::Var: return "s";
    case Op::Neg: return "(-" + n.args[0].str() + ")";
    case Op::Call: {
      std::string out = std::string(func_name(n.func)) + "(";
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        out += n.args[i].str();
      }
      return out + ")";
    }
    default:
      return "(" + n.args[0].str() + " " + op_char(n.op) + " " + n.args[1].str() + ")";
  }
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.op != y.op) return false;
  if (x.op == Op::Literal) return x.value == y.value;
  if (x.op == Op::Call && x.func != y.func) return false;
  return x.args == y.args;
}

Expr parse_expr(std::string_view text) { return Parser(text).parse(); }

double eval_expr(const Expr& e, double s) { return e(s); }

}  // namespace dincl
