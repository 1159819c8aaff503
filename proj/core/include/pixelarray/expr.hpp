#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pixelarray/error.hpp"

namespace pixelarray {

// Immutable expression AST. Binary nodes use `a` and `b`; negate and function
// calls use `a` only.
struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { number, variable, negate, add, sub, mul, div, pow, call };

  Kind kind = Kind::number;
  double number = 0.0;
  std::string name;  // variable or function name
  ExprPtr a, b;
};

ExprPtr make_number(double value);
ExprPtr make_variable(std::string name);
ExprPtr make_unary(Expr::Kind kind, ExprPtr a);                 // negate
ExprPtr make_binary(Expr::Kind kind, ExprPtr a, ExprPtr b);     // add..pow
ExprPtr make_call(std::string function, ExprPtr argument);

// sin cos tan sinh cosh tanh exp ln sqrt abs
bool is_known_function(const std::string& name);

// The value set a relation's expression is compared against.
struct TargetSet {
  enum class Kind { eq_zero, leq_zero, lt_zero, interval };

  Kind kind = Kind::eq_zero;
  double lo = 0.0;  // interval only
  double hi = 0.0;

  static TargetSet eq_zero() { return {Kind::eq_zero, 0.0, 0.0}; }
  static TargetSet leq_zero() { return {Kind::leq_zero, 0.0, 0.0}; }
  static TargetSet lt_zero() { return {Kind::lt_zero, 0.0, 0.0}; }
  static TargetSet interval(double lo, double hi);

  bool operator==(const TargetSet&) const = default;
};

// A parsed relation: `lhs` compared against `target`, normalized so that the
// right-hand side is folded into lhs and the comparison is against zero (or
// an interval when constructed programmatically).
struct Relation {
  std::string id;
  ExprPtr lhs;
  TargetSet target;
  std::vector<std::string> variables;  // sorted free variables of lhs
};

// Parses `<expr> <cmp> <expr>` with cmp in {=, <=, <, >=, >}. `>` and `>=`
// flip to `<` / `<=` by negating the difference. Implicit multiplication is
// not supported: `zx` is one identifier.
Relation parse_relation(const std::string& id, const std::string& text);

// Parses a bare expression (no comparator); used by tests and helpers.
ExprPtr parse_expression(const std::string& text);

Relation make_relation(std::string id, ExprPtr lhs, TargetSet target);

// IEEE-style evaluation. Returns nullopt (UNDEFINED) when any subterm leaves
// the finite reals: division by zero, ln of a nonpositive, sqrt of a
// negative, 0^negative, negative^noninteger, or overflow/NaN anywhere.
std::optional<double> eval(const ExprPtr& expr, const std::map<std::string, double>& assignment);

// Same semantics with the assignment given as parallel sorted-name/value
// spans; the fast path used by plotting loops. Bit-identical to eval().
std::optional<double> eval_sorted(const Expr& expr, std::span<const std::string> names,
                                  std::span<const double> values);

// Point-to-set distance under l_infinity (absolute value for scalars).
// UNDEFINED maps to +infinity, so the pixel can never turn on.
double distance_to_target(std::optional<double> value, const TargetSet& target);

std::string to_string(const ExprPtr& expr);
bool structurally_equal(const ExprPtr& a, const ExprPtr& b);
std::vector<std::string> free_variables(const ExprPtr& expr);

}  // namespace pixelarray
