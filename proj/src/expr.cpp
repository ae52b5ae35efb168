#include "caprig/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace caprig {

int expr_var_index(char c) {
  static const char* order = "uvxyzt";
  const char* p = std::strchr(order, c);
  return p ? static_cast<int>(p - order) : -1;
}

namespace {

const char* kVarNames = "uvxyzt";

struct FuncEntry {
  const char* name;
  ExprOp op;
};
const FuncEntry kFuncs[] = {
    {"sin", ExprOp::Sin},   {"cos", ExprOp::Cos}, {"tan", ExprOp::Tan},
    {"exp", ExprOp::Exp},   {"log", ExprOp::Log}, {"sqrt", ExprOp::Sqrt},
    {"abs", ExprOp::Abs},   {"atan", ExprOp::Atan},
};

struct Parser {
  const std::string& text;
  const std::string& allowed;
  size_t pos = 0;
  std::vector<ExprNode> nodes;

  [[noreturn]] void error(size_t at, const std::string& expected) {
    fail("ParseError", "offset " + std::to_string(at) + ": expected " + expected);
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool peek_is(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }
  bool accept(char c) {
    if (peek_is(c)) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    skip_ws();
    if (!accept(c)) error(pos, std::string("'") + c + "'");
  }

  int add(ExprNode n) {
    nodes.push_back(n);
    return static_cast<int>(nodes.size()) - 1;
  }
  int num(double v) { return add({ExprOp::Num, v, -1, -1, -1}); }
  int unary(ExprOp op, int a) { return add({op, 0.0, -1, a, -1}); }
  int binary(ExprOp op, int a, int b) { return add({op, 0.0, -1, a, b}); }

  int parse_sum() {
    int lhs = parse_term();
    for (;;) {
      if (accept('+'))
        lhs = binary(ExprOp::Add, lhs, parse_term());
      else if (accept('-'))
        lhs = binary(ExprOp::Sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    for (;;) {
      if (accept('*'))
        lhs = binary(ExprOp::Mul, lhs, parse_unary());
      else if (accept('/'))
        lhs = binary(ExprOp::Div, lhs, parse_unary());
      else
        return lhs;
    }
  }

  int parse_unary() {
    if (accept('-')) return unary(ExprOp::Neg, parse_unary());
    return parse_power();
  }

  int parse_power() {
    const int base = parse_primary();
    if (accept('^')) return binary(ExprOp::Pow, base, parse_unary());
    return base;
  }

  int parse_primary() {
    skip_ws();
    if (pos >= text.size()) error(pos, "number, variable, function, '-', or '('");
    const char c = text[pos];
    if (c == '(') {
      ++pos;
      const int inner = parse_sum();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    error(pos, "number, variable, function, '-', or '('");
  }

  int parse_number() {
    const size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      size_t save = pos;
      ++pos;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      } else {
        pos = save;  // "2e" with no exponent digits: the 'e' is not part of the number
      }
    }
    if (pos == start || (pos == start + 1 && text[start] == '.'))
      error(start, "number");
    return num(std::strtod(text.c_str() + start, nullptr));
  }

  int parse_ident() {
    const size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    const std::string name = text.substr(start, pos - start);
    for (const auto& f : kFuncs) {
      if (name == f.name) {
        expect('(');
        const int arg = parse_sum();
        expect(')');
        return unary(f.op, arg);
      }
    }
    if (name.size() == 1) {
      const int idx = expr_var_index(name[0]);
      if (idx >= 0) {
        if (allowed.find(name[0]) == std::string::npos)
          error(start, "a variable from {" + allowed + "}");
        return add({ExprOp::Var, 0.0, idx, -1, -1});
      }
    }
    error(start, "a known function or a variable from {" + allowed + "}");
  }
};

// Grammar slot each node kind may occupy without parentheses.
int level(ExprOp op) {
  switch (op) {
    case ExprOp::Add:
    case ExprOp::Sub: return 0;  // sum
    case ExprOp::Mul:
    case ExprOp::Div: return 1;  // term
    case ExprOp::Neg: return 2;  // unary
    case ExprOp::Pow: return 3;  // power
    default: return 4;           // primary (number, variable, call)
  }
}

void print_node(const std::vector<ExprNode>& nodes, int id, int min_level, std::string& out) {
  const ExprNode& n = nodes[id];
  const bool parens = level(n.op) < min_level;
  if (parens) out += '(';
  switch (n.op) {
    case ExprOp::Num: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", n.value);
      out += buf;
      break;
    }
    case ExprOp::Var: out += kVarNames[n.var]; break;
    case ExprOp::Neg:
      out += '-';
      print_node(nodes, n.a, 2, out);
      break;
    case ExprOp::Add:
    case ExprOp::Sub:
      print_node(nodes, n.a, 0, out);
      out += n.op == ExprOp::Add ? " + " : " - ";
      print_node(nodes, n.b, 1, out);
      break;
    case ExprOp::Mul:
    case ExprOp::Div:
      print_node(nodes, n.a, 1, out);
      out += n.op == ExprOp::Mul ? "*" : "/";
      print_node(nodes, n.b, 2, out);
      break;
    case ExprOp::Pow:
      print_node(nodes, n.a, 4, out);
      out += '^';
      print_node(nodes, n.b, 2, out);
      break;
    default: {  // function call
      static const struct { ExprOp op; const char* name; } names[] = {
          {ExprOp::Sin, "sin"},   {ExprOp::Cos, "cos"}, {ExprOp::Tan, "tan"},
          {ExprOp::Exp, "exp"},   {ExprOp::Log, "log"}, {ExprOp::Sqrt, "sqrt"},
          {ExprOp::Abs, "abs"},   {ExprOp::Atan, "atan"},
      };
      for (const auto& e : names)
        if (e.op == n.op) {
          out += e.name;
          break;
        }
      out += '(';
      print_node(nodes, n.a, 0, out);
      out += ')';
      break;
    }
  }
  if (parens) out += ')';
}

}  // namespace

double Expr::eval(const double vars[6], std::vector<double>& scratch) const {
  require(root_ >= 0, "ParseError", "evaluating an empty expression");
  scratch.resize(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const ExprNode& n = nodes_[i];
    double& r = scratch[i];
    switch (n.op) {
      case ExprOp::Num: r = n.value; break;
      case ExprOp::Var: r = vars[n.var]; break;
      case ExprOp::Neg: r = -scratch[n.a]; break;
      case ExprOp::Add: r = scratch[n.a] + scratch[n.b]; break;
      case ExprOp::Sub: r = scratch[n.a] - scratch[n.b]; break;
      case ExprOp::Mul: r = scratch[n.a] * scratch[n.b]; break;
      case ExprOp::Div: r = scratch[n.a] / scratch[n.b]; break;
      case ExprOp::Pow: r = std::pow(scratch[n.a], scratch[n.b]); break;
      case ExprOp::Sin: r = std::sin(scratch[n.a]); break;
      case ExprOp::Cos: r = std::cos(scratch[n.a]); break;
      case ExprOp::Tan: r = std::tan(scratch[n.a]); break;
      case ExprOp::Exp: r = std::exp(scratch[n.a]); break;
      case ExprOp::Log: r = std::log(scratch[n.a]); break;
      case ExprOp::Sqrt: r = std::sqrt(scratch[n.a]); break;
      case ExprOp::Abs: r = std::abs(scratch[n.a]); break;
      case ExprOp::Atan: r = std::atan(scratch[n.a]); break;
    }
  }
  return scratch[root_];
}

double Expr::eval(const double vars[6]) const {
  std::vector<double> scratch;
  return eval(vars, scratch);
}

std::string Expr::print() const {
  require(root_ >= 0, "ParseError", "printing an empty expression");
  std::string out;
  print_node(nodes_, root_, 0, out);
  return out;
}

bool Expr::same(const Expr& other) const {
  if (nodes_.size() != other.nodes_.size() || root_ != other.root_) return false;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const ExprNode &a = nodes_[i], &b = other.nodes_[i];
    if (a.op != b.op || a.var != b.var || a.a != b.a || a.b != b.b) return false;
    if (a.op == ExprOp::Num && a.value != b.value) return false;
  }
  return true;
}

Expr parse_expression(const std::string& text, const std::string& allowed) {
  require(text.size() <= 64 * 1024, "ParseError", "offset 0: expected input <= 64 KiB");
  Parser p{text, allowed, 0, {}};
  const int root = p.parse_sum();
  p.skip_ws();
  if (p.pos != text.size())
    p.error(p.pos, "end of input or an operator");
  return Expr(std::move(p.nodes), root);
}

}  // namespace caprig
