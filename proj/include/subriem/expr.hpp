#pragma once

#include "subriem/geometry.hpp"
#include "subriem/taylor.hpp"

#include <Eigen/Dense>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace subriem {

/// Lexical, syntax, or binding error with a 1-based source position.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

/// Domain error during evaluation (log of a nonpositive value, division by zero, ...).
class EvalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class ExprContext {
  Point,    // x1..x{d_amb}, rho, xh, xv
  Radial,   // the single variable rho
  Operator, // Point identifiers plus r, p<i>, M<i>_<j>, mplus, mminus
};

struct ExprNode;

/// Immutable parsed expression bound to a geometry; cheap to copy and share across threads.
class Expr {
public:
  Expr() = default;
  Expr(std::shared_ptr<const ExprNode> root, GeometrySpec geometry, ExprContext context, int op_dim);

  bool empty() const { return root_ == nullptr; }
  const ExprNode& root() const { return *root_; }
  const GeometrySpec& geometry() const { return geometry_; }
  ExprContext context() const { return context_; }
  int operator_dim() const { return op_dim_; }
  /// True when the expression contains no variables.
  bool is_constant() const;

private:
  std::shared_ptr<const ExprNode> root_;
  GeometrySpec geometry_;
  ExprContext context_ = ExprContext::Point;
  int op_dim_ = 0;
};

Expr parse(const std::string& src, const GeometrySpec& g);
/// Parses a one-variable profile f(rho).
Expr parse_radial(const std::string& src);
/// Parses G(x, r, p, M) for an m x m matrix slot.
Expr parse_operator(const std::string& src, const GeometrySpec& g, int m);

std::string print(const Expr& e);
bool structurally_equal(const Expr& a, const Expr& b);

double eval(const Expr& e, const Point& p);
Taylor2 eval_taylor(const Expr& e, const Point& p);

/// f, f', f'' of a radial expression at rho.
Taylor2 eval_radial(const Expr& e, double rho);

struct OperatorArgs {
  Point x;
  double r = 0.0;
  Eigen::VectorXd p;
  Eigen::MatrixXd M;
};

double eval_operator(const Expr& e, const OperatorArgs& args);

/// A horizontal (m entries) or Euclidean (d_amb entries) vector field.
struct VectorExpr {
  std::vector<Expr> entries;
  bool euclidean = false;

  /// Zero field when there are no entries.
  bool is_zero() const { return entries.empty(); }
  Eigen::VectorXd eval(const Point& p, int expected_dim) const;
};

} // namespace subriem
