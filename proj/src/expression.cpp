#include "bandgap/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "bandgap/types.hpp"

namespace bandgap {

struct Expression::Node {
  enum class Kind { Constant, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Call };
  enum class Func { Exp, Log, Sqrt, Sin, Cos, Abs };

  Kind kind = Kind::Constant;
  double value = 0.0;
  Func func = Func::Exp;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;

  double eval(double x, double y) const {
    switch (kind) {
      case Kind::Constant: return value;
      case Kind::VarX: return x;
      case Kind::VarY: return y;
      case Kind::Neg: return -lhs->eval(x, y);
      case Kind::Add: return lhs->eval(x, y) + rhs->eval(x, y);
      case Kind::Sub: return lhs->eval(x, y) - rhs->eval(x, y);
      case Kind::Mul: return lhs->eval(x, y) * rhs->eval(x, y);
      case Kind::Div: return lhs->eval(x, y) / rhs->eval(x, y);
      case Kind::Pow: return std::pow(lhs->eval(x, y), rhs->eval(x, y));
      case Kind::Call: {
        const double arg = lhs->eval(x, y);
        switch (func) {
          case Func::Exp: return std::exp(arg);
          case Func::Log: return std::log(arg);
          case Func::Sqrt: return std::sqrt(arg);
          case Func::Sin: return std::sin(arg);
          case Func::Cos: return std::cos(arg);
          case Func::Abs: return std::abs(arg);
        }
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr constant(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->value = v;
  return n;
}

// Recursive descent:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | '+' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression \"" + std::string(src_) + "\": " + what + " at offset " +
                      std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) n = make(Kind::Add, n, term());
      else if (accept('-')) n = make(Kind::Sub, n, term());
      else return n;
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = make(Kind::Mul, n, unary());
      else if (accept('/')) n = make(Kind::Div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) return make(Kind::Pow, base, unary());
    return base;
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::string rest(src_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("bad number");
    }
    pos_ += used;
    return constant(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string name(src_.substr(start, pos_ - start));
    if (name == "x") return make(Kind::VarX);
    if (name == "y") return make(Kind::VarY);
    if (name == "pi") return constant(std::numbers::pi);
    if (name == "e") return constant(std::numbers::e);

    using Func = Expression::Node::Func;
    Func f{};
    if (name == "exp") f = Func::Exp;
    else if (name == "log") f = Func::Log;
    else if (name == "sqrt") f = Func::Sqrt;
    else if (name == "sin") f = Func::Sin;
    else if (name == "cos") f = Func::Cos;
    else if (name == "abs") f = Func::Abs;
    else fail("unknown identifier '" + name + "'");

    if (!accept('(')) fail("expected '(' after " + name);
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::Call;
    n->func = f;
    n->lhs = expr();
    if (!accept(')')) fail("expected ')'");
    return n;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text) {
  Parser p(text);
  return Expression(std::string(text), p.parse());
}

double Expression::operator()(double x, double y) const { return root_->eval(x, y); }

}  // namespace bandgap
