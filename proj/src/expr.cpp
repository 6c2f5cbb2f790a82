#include "lpq/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace lpq {

Expr make_num(double v) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Num;
  n->value = v;
  return n;
}

Expr make_var(int k) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Var;
  n->var = k;
  return n;
}

Expr make_unary(Op op, Expr a) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->args = {std::move(a)};
  return n;
}

Expr make_binary(Op op, Expr a, Expr b) {
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->args = {std::move(a), std::move(b)};
  return n;
}

Expr make_call(Fn fn, std::vector<Expr> args) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::Call;
  n->fn = fn;
  n->args = std::move(args);
  return n;
}

const char* fn_name(Fn fn) {
  switch (fn) {
    case Fn::Abs: return "abs";
    case Fn::Exp: return "exp";
    case Fn::Log: return "log";
    case Fn::Sqrt: return "sqrt";
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Min: return "min";
    case Fn::Max: return "max";
  }
  return "?";
}

int fn_arity(Fn fn) { return (fn == Fn::Min || fn == Fn::Max) ? 2 : 1; }

namespace {

struct Parser {
  const std::string& s;
  int dim;
  std::size_t pos = 0;

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool peek(char c) {
    skip();
    return pos < s.size() && s[pos] == c;
  }
  void expect(char c) {
    if (!peek(c)) throw ParseError(std::string("expected '") + c + "'", pos);
    ++pos;
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (peek('+')) {
        ++pos;
        lhs = make_binary(Op::Add, lhs, term());
      } else if (peek('-')) {
        ++pos;
        lhs = make_binary(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (peek('*')) {
        ++pos;
        lhs = make_binary(Op::Mul, lhs, unary());
      } else if (peek('/')) {
        ++pos;
        lhs = make_binary(Op::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  Expr unary() {
    if (peek('-')) {
      ++pos;
      return make_unary(Op::Neg, unary());
    }
    if (peek('+')) {
      ++pos;
      return unary();
    }
    return power();
  }

  Expr power() {
    Expr lhs = primary();
    while (peek('^')) {
      ++pos;
      lhs = make_binary(Op::Pow, lhs, exponent());
    }
    return lhs;
  }

  // a signed primary, so that 2^-1 is accepted
  Expr exponent() {
    if (peek('-')) {
      ++pos;
      return make_unary(Op::Neg, exponent());
    }
    return primary();
  }

  Expr primary() {
    skip();
    if (pos >= s.size()) throw ParseError("unexpected end of input", pos);
    char c = s[pos];
    if (c == '(') {
      ++pos;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
    throw ParseError(std::string("unexpected character '") + c + "'", pos);
  }

  Expr number() {
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
      std::size_t save = pos;
      ++pos;
      if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
      if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      } else {
        pos = save;
      }
    }
    std::string tok = s.substr(start, pos - start);
    if (tok == ".") throw ParseError("malformed number", start);
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || !std::isfinite(v))
      throw ParseError("malformed number", start);
    return make_num(v);
  }

  Expr ident() {
    std::size_t start = pos;
    while (pos < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
      ++pos;
    std::string name = s.substr(start, pos - start);
    if (name == "pi") {
      auto n = std::make_shared<ExprNode>();
      n->op = Op::Pi;
      return n;
    }
    if (name.size() >= 2 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos && name[1] != '0') {
      int k = std::atoi(name.c_str() + 1);
      if (k < 1 || (dim > 0 && k > dim))
        throw ParseError("unknown identifier '" + name + "'", start);
      return make_var(k - 1);
    }
    static const Fn fns[] = {Fn::Abs, Fn::Exp, Fn::Log, Fn::Sqrt,
                             Fn::Sin, Fn::Cos, Fn::Min, Fn::Max};
    for (Fn f : fns) {
      if (name == fn_name(f)) {
        expect('(');
        std::vector<Expr> args;
        args.push_back(expr());
        while (peek(',')) {
          ++pos;
          args.push_back(expr());
        }
        expect(')');
        if (static_cast<int>(args.size()) != fn_arity(f))
          throw ParseError("wrong argument count for '" + name + "'", start);
        return make_call(f, std::move(args));
      }
    }
    throw ParseError("unknown identifier '" + name + "'", start);
  }
};

void print_rec(const Expr& e, std::string& out) {
  switch (e->op) {
    case Op::Num: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", e->value);
      out += buf;
      return;
    }
    case Op::Var:
      out += "x" + std::to_string(e->var + 1);
      return;
    case Op::Pi:
      out += "pi";
      return;
    case Op::Neg:
      out += "(-";
      print_rec(e->args[0], out);
      out += ")";
      return;
    case Op::Call:
      out += fn_name(e->fn);
      out += "(";
      for (std::size_t i = 0; i < e->args.size(); ++i) {
        if (i) out += ",";
        print_rec(e->args[i], out);
      }
      out += ")";
      return;
    default: {
      static const char sym[] = {'+', '-', '*', '/', '^'};
      int k = static_cast<int>(e->op) - static_cast<int>(Op::Add);
      out += "(";
      print_rec(e->args[0], out);
      out += sym[k];
      print_rec(e->args[1], out);
      out += ")";
    }
  }
}

}  // namespace

Expr parse_expr(const std::string& text, int dim) {
  Parser p{text, dim};
  p.skip();
  if (p.pos >= text.size()) throw ParseError("empty expression", 0);
  Expr e = p.expr();
  p.skip();
  if (p.pos != text.size()) throw ParseError("trailing input", p.pos);
  return e;
}

std::string print_expr(const Expr& e) {
  std::string out;
  print_rec(e, out);
  return out;
}

static double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
  return v;
}

double eval(const Expr& e, const double* x, int dim) {
  switch (e->op) {
    case Op::Num: return e->value;
    case Op::Pi: return std::numbers::pi;
    case Op::Var:
      if (e->var >= dim) throw DomainError("variable x" + std::to_string(e->var + 1) + " out of range");
      return x[e->var];
    case Op::Neg: return -eval(e->args[0], x, dim);
    case Op::Add: return checked(eval(e->args[0], x, dim) + eval(e->args[1], x, dim), "+");
    case Op::Sub: return checked(eval(e->args[0], x, dim) - eval(e->args[1], x, dim), "-");
    case Op::Mul: return checked(eval(e->args[0], x, dim) * eval(e->args[1], x, dim), "*");
    case Op::Div: {
      double a = eval(e->args[0], x, dim), b = eval(e->args[1], x, dim);
      if (b == 0.0) throw DomainError("division by zero");
      return checked(a / b, "/");
    }
    case Op::Pow: {
      double a = eval(e->args[0], x, dim), b = eval(e->args[1], x, dim);
      if (a < 0.0 && b != std::floor(b)) throw DomainError("fractional power of negative base");
      if (a == 0.0 && b < 0.0) throw DomainError("negative power of zero");
      return checked(std::pow(a, b), "^");
    }
    case Op::Call: {
      double a = eval(e->args[0], x, dim);
      switch (e->fn) {
        case Fn::Abs: return std::fabs(a);
        case Fn::Exp: return checked(std::exp(a), "exp");
        case Fn::Log:
          if (a <= 0.0) throw DomainError("log of non-positive argument");
          return std::log(a);
        case Fn::Sqrt:
          if (a < 0.0) throw DomainError("sqrt of negative argument");
          return std::sqrt(a);
        case Fn::Sin: return std::sin(a);
        case Fn::Cos: return std::cos(a);
        case Fn::Min: return std::min(a, eval(e->args[1], x, dim));
        case Fn::Max: return std::max(a, eval(e->args[1], x, dim));
      }
    }
  }
  throw DomainError("bad expression node");
}

bool equal(const Expr& a, const Expr& b) {
  if (a->op != b->op || a->args.size() != b->args.size()) return false;
  if (a->op == Op::Num && a->value != b->value) return false;
  if (a->op == Op::Var && a->var != b->var) return false;
  if (a->op == Op::Call && a->fn != b->fn) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!equal(a->args[i], b->args[i])) return false;
  return true;
}

int max_var(const Expr& e) {
  int m = e->op == Op::Var ? e->var + 1 : 0;
  for (const auto& a : e->args) m = std::max(m, max_var(a));
  return m;
}

}  // namespace lpq
