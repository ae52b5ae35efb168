#pragma once
// Arithmetic expression mini-language used by scenario files: numbers,
// variables from {u, v, x, y, z, t}, + - * / ^ (right-associative ^),
// unary -, and the functions sin cos tan exp log sqrt abs atan.
#include "caprig/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace caprig {

enum class ExprOp : uint8_t {
  Num, Var, Neg, Add, Sub, Mul, Div, Pow,
  Sin, Cos, Tan, Exp, Log, Sqrt, Abs, Atan,
};

struct ExprNode {
  ExprOp op;
  double value = 0.0;  // Num
  int var = -1;        // Var: index into "uvxyzt"
  int a = -1, b = -1;  // children (indices into the node arena)
};

// Immutable parsed expression. Nodes are stored in evaluation (post) order,
// so eval is a single forward pass over the arena.
class Expr {
 public:
  Expr() = default;
  Expr(std::vector<ExprNode> nodes, int root) : nodes_(std::move(nodes)), root_(root) {}

  bool empty() const { return root_ < 0; }

  // vars indexed by position in "uvxyzt"; unused slots may hold anything.
  double eval(const double vars[6]) const;
  double eval(const double vars[6], std::vector<double>& scratch) const;

  // Minimal re-parseable rendering: parse(print()) yields an identical AST.
  std::string print() const;

  bool same(const Expr& other) const;
  const std::vector<ExprNode>& nodes() const { return nodes_; }

 private:
  std::vector<ExprNode> nodes_;
  int root_ = -1;
};

// `allowed` restricts which of u v x y z t may appear (e.g. "uv" for domain
// charts, "xyzt" for metric entries). Throws ParseError with the byte offset
// of the offending token and the expected-token set.
Expr parse_expression(const std::string& text, const std::string& allowed = "uvxyzt");

// Position of a variable letter within the canonical slot order "uvxyzt".
int expr_var_index(char c);

}  // namespace caprig
