#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpq {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Op { Num, Var, Pi, Neg, Add, Sub, Mul, Div, Pow, Call };

enum class Fn { Abs, Exp, Log, Sqrt, Sin, Cos, Min, Max };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  Op op = Op::Num;
  double value = 0.0;   // Num
  int var = 0;          // Var, 0-based
  Fn fn = Fn::Abs;      // Call
  std::vector<Expr> args;
};

// dim > 0 restricts variables to x1..x<dim>
Expr parse_expr(const std::string& text, int dim = 0);

// fully parenthesised, parse_expr(print_expr(e)) reproduces e
std::string print_expr(const Expr& e);

double eval(const Expr& e, const double* x, int dim);

bool equal(const Expr& a, const Expr& b);

// largest variable index used, plus one
int max_var(const Expr& e);

Expr make_num(double v);
Expr make_var(int k);
Expr make_unary(Op op, Expr a);
Expr make_binary(Op op, Expr a, Expr b);
Expr make_call(Fn fn, std::vector<Expr> args);

const char* fn_name(Fn fn);
int fn_arity(Fn fn);

}  // namespace lpq
