#pragma once

#include <memory>
#include <string>
#include <vector>

#include "symjet/errors.hpp"

namespace symjet {

// Small expression language for chart fields: variables x1..xn, literals,
// + - * / ^ (integer powers), unary minus, and sin cos exp log sqrt atan.

enum class Func { Sin, Cos, Exp, Log, Sqrt, Atan };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Call };
  Kind kind;
  double value = 0.0;    // Const
  int var = 0;           // Var (0-based)
  int exponent = 0;      // Pow
  Func func = Func::Sin; // Call
  ExprPtr a, b;
};

class Expr {
public:
  Expr() = default;
  explicit Expr(ExprPtr root, int max_var) : root_(std::move(root)), max_var_(max_var) {}

  bool valid() const { return root_ != nullptr; }
  const ExprPtr& root() const { return root_; }
  // Highest variable index used, plus one (0 for constant expressions).
  int min_dim() const { return max_var_; }

  double eval(const std::vector<double>& x) const;
  std::string to_string() const;

  bool structurally_equal(const Expr& other) const;

private:
  ExprPtr root_;
  int max_var_ = 0;
};

// Parses `text` against chart dimension n. Unknown identifiers and variables
// beyond xn are rejected. Throws SyntaxError with a 1-based column.
Expr parse_expr(const std::string& text, int n);

// Compiled postfix program for fast repeated evaluation.
struct TapeOp {
  enum class K { Const, Var, Add, Sub, Mul, Div, Neg, PowInt, Call };
  K k;
  double imm = 0.0;
  int var = 0;
  int exponent = 0;
  Func func = Func::Sin;
};

class Tape {
public:
  Tape() = default;
  explicit Tape(const Expr& e);
  const std::vector<TapeOp>& ops() const { return ops_; }
  bool empty() const { return ops_.empty(); }
  double eval(const double* x) const;

private:
  std::vector<TapeOp> ops_;
};

}  // namespace symjet
