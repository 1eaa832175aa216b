#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "contactflow/dual.hpp"

namespace contactflow {

/// Thrown on malformed expression text; offset is a byte position into the
/// original string.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, size_t offset)
      : std::runtime_error(msg + " (byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

/// Thrown when evaluation leaves the domain of an elementary function
/// (log of a non-positive value, division by zero, ...) or produces a
/// non-finite number.  The message names the offending subexpression.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Func : uint8_t { Sin, Cos, Tan, Exp, Log, Sqrt };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression tree over a fixed coordinate list.
struct Expr {
  enum class Kind : uint8_t { Number, Coord, Neg, Add, Sub, Mul, Div, Pow, Call };

  Kind kind;
  double number = 0.0;   // Kind::Number
  int coord = -1;        // Kind::Coord: index into the coordinate list
  std::string name;      // Kind::Coord: coordinate name, kept for messages
  Func func = Func::Sin; // Kind::Call
  ExprPtr a, b;          // operands (unary/call use a only)

  static ExprPtr num(double v);
  static ExprPtr var(int index, std::string name);
  static ExprPtr unary(Kind k, ExprPtr a);
  static ExprPtr binary(Kind k, ExprPtr a, ExprPtr b);
  static ExprPtr call(Func f, ExprPtr a);
};

bool operator==(const Expr& a, const Expr& b);

/// Parse an expression over the given coordinate names.
/// Precedence, tightest first: ^  then unary -  then * /  then + -.
/// All binary operators associate to the left, so 2^3^2 == (2^3)^2.
/// A '-' directly after '^' is accepted, so y^-2 means y^(-2).
ExprPtr parse(const std::string& text, std::span<const std::string> coords);

/// Render with the minimal parentheses needed so that
/// parse(print(e)) reproduces e node for node.
std::string print(const Expr& e);

namespace detail {

[[noreturn]] void evalFail(const Expr& e, const char* reason);

inline bool integerExponent(const Expr& e, long long& out) {
  const Expr* p = &e;
  bool neg = false;
  while (p->kind == Expr::Kind::Neg) {
    neg = !neg;
    p = p->a.get();
  }
  if (p->kind != Expr::Kind::Number) return false;
  double v = p->number;
  if (v != static_cast<long long>(v) || v > 64 || v < -64) return false;
  out = neg ? -static_cast<long long>(v) : static_cast<long long>(v);
  return true;
}

}  // namespace detail

/// Evaluate at a point whose scalars may be nested duals; derivatives ride
/// along automatically.  Throws EvalError on domain violations.
template <class S>
S evalExpr(const Expr& e, std::span<const S> x) {
  using K = Expr::Kind;
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sqrt;
  using std::tan;
  switch (e.kind) {
    case K::Number:
      return S(e.number);
    case K::Coord:
      return x[static_cast<size_t>(e.coord)];
    case K::Neg:
      return -evalExpr(*e.a, x);
    case K::Add:
      return evalExpr(*e.a, x) + evalExpr(*e.b, x);
    case K::Sub:
      return evalExpr(*e.a, x) - evalExpr(*e.b, x);
    case K::Mul:
      return evalExpr(*e.a, x) * evalExpr(*e.b, x);
    case K::Div: {
      S num = evalExpr(*e.a, x);
      S den = evalExpr(*e.b, x);
      if (valueOf(den) == 0.0) detail::evalFail(e, "division by zero");
      return num / den;
    }
    case K::Pow: {
      S base = evalExpr(*e.a, x);
      long long k;
      if (detail::integerExponent(*e.b, k)) {
        if (k < 0 && valueOf(base) == 0.0)
          detail::evalFail(e, "zero raised to a negative power");
        return powInt(base, k);
      }
      S ex = evalExpr(*e.b, x);
      if (valueOf(base) <= 0.0)
        detail::evalFail(e, "non-integer power of a non-positive base");
      return exp(ex * log(base));
    }
    case K::Call: {
      S arg = evalExpr(*e.a, x);
      switch (e.func) {
        case Func::Sin: return sin(arg);
        case Func::Cos: return cos(arg);
        case Func::Tan: {
          S r = tan(arg);
          if (!isFiniteDeep(r)) detail::evalFail(e, "tan pole");
          return r;
        }
        case Func::Exp: return exp(arg);
        case Func::Log:
          if (valueOf(arg) <= 0.0) detail::evalFail(e, "log of a non-positive value");
          return log(arg);
        case Func::Sqrt:
          if (valueOf(arg) <= 0.0)
            detail::evalFail(e, "sqrt of a non-positive value");
          return sqrt(arg);
      }
      detail::evalFail(e, "unknown function");
    }
  }
  detail::evalFail(e, "corrupt expression node");
}

}  // namespace contactflow
