#ifndef FPS_EXPR_HPP
#define FPS_EXPR_HPP

#include <memory>
#include <string>
#include <vector>

#include "fps/field.hpp"
#include "fps/jet.hpp"

namespace fps {

struct SourceSpan {
  int line = 0;
  int col = 0;
};

enum class ExprKind { Constant, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Call };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// AST node for one component of the defining map G. Immutable after parse.
struct Expr {
  ExprKind kind;
  SourceSpan span;
  Rational value;            // Constant
  int deriv = 0;             // VarY: derivative order j
  int comp = 0;              // VarY: component index
  bool comp_explicit = false;
  unsigned exponent = 0;     // Pow
  AnalyticFn fn = AnalyticFn::Exp;  // Call
  ExprPtr lhs, rhs;
};

struct parse_error : std::runtime_error {
  int line, col;
  parse_error(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg), line(line_), col(col_) {}
};

struct validation_error : std::runtime_error {
  int line, col;
  validation_error(const std::string& msg, int line_ = 0, int col_ = 0)
      : std::runtime_error(msg), line(line_), col(col_) {}
};

ExprPtr make_constant(Rational v);
ExprPtr make_var_x();
ExprPtr make_var_y(int deriv, int comp);
ExprPtr make_neg(ExprPtr a);
ExprPtr make_binary(ExprKind kind, ExprPtr a, ExprPtr b);
ExprPtr make_pow(ExprPtr a, unsigned exponent);
ExprPtr make_call(AnalyticFn fn, ExprPtr a);

ExprPtr parse_expression(const std::string& source);
std::string print_expression(const Expr& e);
inline std::string print_expression(const ExprPtr& e) { return print_expression(*e); }

bool expr_structurally_equal(const Expr& a, const Expr& b);

// Problem dimensions: r equations, d unknown components, derivatives up to n.
struct Problem {
  std::vector<ExprPtr> equations;
  int deriv_order_n = 0;
  int dim_d = 1;
  int num_eqs_r = 1;
  FieldMode field = FieldMode::RationalExact;
  Tolerance tol;

  bool square() const { return num_eqs_r == dim_d; }
  bool underdetermined() const { return num_eqs_r < dim_d; }
  bool overdetermined() const { return num_eqs_r > dim_d; }
};

// Checks every y-reference against (n, d) and enforces the exact-mode
// restrictions (no analytic primitives, division only by literal constants).
// Returns the expression with unspecified component indices resolved.
ExprPtr validate_expression(const ExprPtr& e, int n, int d, FieldMode mode);
void validate_problem(Problem& p);

}  // namespace fps

#endif
