#include "contactflow/expr.hpp"

#include <charconv>
#include <cstdio>
#include <map>

namespace contactflow {

ExprPtr Expr::num(double v) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Number;
  e->number = v;
  return e;
}

ExprPtr Expr::var(int index, std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Coord;
  e->coord = index;
  e->name = std::move(name);
  return e;
}

ExprPtr Expr::unary(Kind k, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->a = std::move(a);
  return e;
}

ExprPtr Expr::binary(Kind k, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

ExprPtr Expr::call(Func f, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Call;
  e->func = f;
  e->a = std::move(a);
  return e;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Number: return a.number == b.number;
    case Expr::Kind::Coord: return a.coord == b.coord;
    case Expr::Kind::Neg: return *a.a == *b.a;
    case Expr::Kind::Call: return a.func == b.func && *a.a == *b.a;
    default: return *a.a == *b.a && *a.b == *b.b;
  }
}

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Lexer {
  const std::string& text;
  size_t pos = 0;
  Tok tok = Tok::End;
  double number = 0.0;
  std::string ident;
  size_t tokStart = 0;

  explicit Lexer(const std::string& t) : text(t) { next(); }

  void next() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    tokStart = pos;
    if (pos >= text.size()) {
      tok = Tok::End;
      return;
    }
    char c = text[pos];
    if ((c >= '0' && c <= '9') || c == '.') {
      double v;
      auto res = std::from_chars(text.data() + pos, text.data() + text.size(), v);
      if (res.ec != std::errc() || res.ptr == text.data() + pos)
        throw ParseError("malformed number", pos);
      pos = static_cast<size_t>(res.ptr - text.data());
      tok = Tok::Number;
      number = v;
      return;
    }
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
      size_t start = pos;
      while (pos < text.size() &&
             ((text[pos] >= 'a' && text[pos] <= 'z') ||
              (text[pos] >= 'A' && text[pos] <= 'Z') ||
              (text[pos] >= '0' && text[pos] <= '9') || text[pos] == '_'))
        ++pos;
      tok = Tok::Ident;
      ident = text.substr(start, pos - start);
      return;
    }
    ++pos;
    switch (c) {
      case '+': tok = Tok::Plus; return;
      case '-': tok = Tok::Minus; return;
      case '*': tok = Tok::Star; return;
      case '/': tok = Tok::Slash; return;
      case '^': tok = Tok::Caret; return;
      case '(': tok = Tok::LParen; return;
      case ')': tok = Tok::RParen; return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", tokStart);
  }
};

const std::map<std::string, Func, std::less<>> kFuncs = {
    {"sin", Func::Sin}, {"cos", Func::Cos}, {"tan", Func::Tan},
    {"exp", Func::Exp}, {"log", Func::Log}, {"sqrt", Func::Sqrt},
};

struct Parser {
  Lexer lex;
  std::span<const std::string> coords;

  Parser(const std::string& text, std::span<const std::string> c)
      : lex(text), coords(c) {}

  ExprPtr parseAll() {
    ExprPtr e = sum();
    if (lex.tok != Tok::End)
      throw ParseError("trailing input after expression", lex.tokStart);
    return e;
  }

  ExprPtr sum() {
    ExprPtr e = product();
    while (lex.tok == Tok::Plus || lex.tok == Tok::Minus) {
      auto k = lex.tok == Tok::Plus ? Expr::Kind::Add : Expr::Kind::Sub;
      lex.next();
      e = Expr::binary(k, e, product());
    }
    return e;
  }

  ExprPtr product() {
    ExprPtr e = unary();
    while (lex.tok == Tok::Star || lex.tok == Tok::Slash) {
      auto k = lex.tok == Tok::Star ? Expr::Kind::Mul : Expr::Kind::Div;
      lex.next();
      e = Expr::binary(k, e, unary());
    }
    return e;
  }

  ExprPtr unary() {
    if (lex.tok == Tok::Minus) {
      lex.next();
      return Expr::unary(Expr::Kind::Neg, unary());
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr e = atom();
    while (lex.tok == Tok::Caret) {
      lex.next();
      e = Expr::binary(Expr::Kind::Pow, e, exponent());
    }
    return e;
  }

  // '^' binds tighter than unary minus, but a sign directly in exponent
  // position (y^-2) is still accepted.
  ExprPtr exponent() {
    if (lex.tok == Tok::Minus) {
      lex.next();
      return Expr::unary(Expr::Kind::Neg, exponent());
    }
    return atom();
  }

  ExprPtr atom() {
    switch (lex.tok) {
      case Tok::Number: {
        double v = lex.number;
        lex.next();
        return Expr::num(v);
      }
      case Tok::LParen: {
        lex.next();
        ExprPtr e = sum();
        if (lex.tok != Tok::RParen)
          throw ParseError("expected ')'", lex.tokStart);
        lex.next();
        return e;
      }
      case Tok::Ident: {
        std::string name = lex.ident;
        size_t at = lex.tokStart;
        lex.next();
        if (auto f = kFuncs.find(name); f != kFuncs.end()) {
          if (lex.tok != Tok::LParen)
            throw ParseError("expected '(' after '" + name + "'", lex.tokStart);
          lex.next();
          ExprPtr arg = sum();
          if (lex.tok != Tok::RParen)
            throw ParseError("expected ')'", lex.tokStart);
          lex.next();
          return Expr::call(f->second, arg);
        }
        for (size_t i = 0; i < coords.size(); ++i)
          if (coords[i] == name)
            return Expr::var(static_cast<int>(i), name);
        throw ParseError("unknown identifier '" + name + "'", at);
      }
      default:
        throw ParseError("expected a value", lex.tokStart);
    }
  }
};

int precedence(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    case Expr::Kind::Neg: return 3;
    case Expr::Kind::Pow: return 4;
    default: return 5;
  }
}

void printNode(const Expr& e, std::string& out) {
  auto child = [&out](const Expr& c, int minPrec) {
    bool parens = precedence(c.kind) < minPrec;
    if (parens) out += '(';
    printNode(c, out);
    if (parens) out += ')';
  };
  int p = precedence(e.kind);
  switch (e.kind) {
    case Expr::Kind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", e.number);
      out += buf;
      return;
    }
    case Expr::Kind::Coord:
      out += e.name;
      return;
    case Expr::Kind::Neg:
      out += '-';
      child(*e.a, p);
      return;
    case Expr::Kind::Add:
      child(*e.a, p);
      out += " + ";
      child(*e.b, p + 1);
      return;
    case Expr::Kind::Sub:
      child(*e.a, p);
      out += " - ";
      child(*e.b, p + 1);
      return;
    case Expr::Kind::Mul:
      child(*e.a, p);
      out += '*';
      child(*e.b, p + 1);
      return;
    case Expr::Kind::Div:
      child(*e.a, p);
      out += '/';
      child(*e.b, p + 1);
      return;
    case Expr::Kind::Pow:
      child(*e.a, p);
      out += '^';
      // Right operand: parenthesize nested '^' (left associativity) but let
      // a bare sign through, matching the exponent grammar.
      if (e.b->kind == Expr::Kind::Neg) {
        const Expr* c = e.b.get();
        std::string inner;
        printNode(*c, inner);
        bool simple = true;
        const Expr* body = c;
        while (body->kind == Expr::Kind::Neg) body = body->a.get();
        simple = precedence(body->kind) >= 5;
        if (simple) out += inner;
        else { out += '('; out += inner; out += ')'; }
      } else {
        child(*e.b, p + 1);
      }
      return;
    case Expr::Kind::Call: {
      switch (e.func) {
        case Func::Sin: out += "sin"; break;
        case Func::Cos: out += "cos"; break;
        case Func::Tan: out += "tan"; break;
        case Func::Exp: out += "exp"; break;
        case Func::Log: out += "log"; break;
        case Func::Sqrt: out += "sqrt"; break;
      }
      out += '(';
      printNode(*e.a, out);
      out += ')';
      return;
    }
  }
}

}  // namespace

ExprPtr parse(const std::string& text, std::span<const std::string> coords) {
  Parser p(text, coords);
  return p.parseAll();
}

std::string print(const Expr& e) {
  std::string out;
  printNode(e, out);
  return out;
}

namespace detail {

void evalFail(const Expr& e, const char* reason) {
  throw EvalError(std::string(reason) + " in '" + print(e) + "'");
}

}  // namespace detail

}  // namespace contactflow
