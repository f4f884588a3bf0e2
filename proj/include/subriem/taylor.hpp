#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace subriem {

/// Second-order forward-mode number: value, Euclidean gradient and Hessian.
///
/// Every operation applies the full chain rule, so composing elementary
/// functions yields exact first and second derivatives up to roundoff. The
/// value slot is computed with exactly the same floating-point operations as
/// the plain `double` path.
class Taylor2 {
public:
  Taylor2() = default;

  /// Constant in `dim` variables.
  Taylor2(double value, int dim)
      : value_(value), grad_(Eigen::VectorXd::Zero(dim)), hess_(Eigen::MatrixXd::Zero(dim, dim)) {}

  Taylor2(double value, Eigen::VectorXd grad, Eigen::MatrixXd hess, bool nonsmooth = false)
      : value_(value), grad_(std::move(grad)), hess_(std::move(hess)), nonsmooth_(nonsmooth) {}

  /// The coordinate function x_index evaluated at `value`.
  static Taylor2 variable(double value, int dim, int index);

  double value() const { return value_; }
  const Eigen::VectorXd& grad() const { return grad_; }
  const Eigen::MatrixXd& hess() const { return hess_; }
  int dim() const { return static_cast<int>(grad_.size()); }

  /// Set when a kink (abs, min, max) was crossed at a tie and a one-sided branch was taken.
  bool nonsmooth() const { return nonsmooth_; }
  void mark_nonsmooth() { nonsmooth_ = true; }

  /// Applies a scalar function given its value and first two derivatives at value().
  Taylor2 compose(double f, double df, double d2f) const;

  Taylor2 operator-() const;
  Taylor2& operator+=(const Taylor2& o);
  Taylor2& operator-=(const Taylor2& o);
  Taylor2& operator*=(const Taylor2& o);
  Taylor2& operator/=(const Taylor2& o);

private:
  double value_ = 0.0;
  Eigen::VectorXd grad_;
  Eigen::MatrixXd hess_;
  bool nonsmooth_ = false;
};

Taylor2 operator+(Taylor2 a, const Taylor2& b);
Taylor2 operator-(Taylor2 a, const Taylor2& b);
Taylor2 operator*(const Taylor2& a, const Taylor2& b);
Taylor2 operator/(const Taylor2& a, const Taylor2& b);

Taylor2 operator+(Taylor2 a, double b);
Taylor2 operator+(double a, Taylor2 b);
Taylor2 operator-(Taylor2 a, double b);
Taylor2 operator-(double a, const Taylor2& b);
Taylor2 operator*(Taylor2 a, double b);
Taylor2 operator*(double a, Taylor2 b);
Taylor2 operator/(Taylor2 a, double b);
Taylor2 operator/(double a, const Taylor2& b);

Taylor2 sqrt(const Taylor2& a);
Taylor2 log(const Taylor2& a);
Taylor2 exp(const Taylor2& a);
Taylor2 abs(const Taylor2& a);
/// a^e for a real constant exponent; requires a > 0 unless e is a nonnegative integer.
Taylor2 pow(const Taylor2& a, double e);
Taylor2 ipow(const Taylor2& a, int e);
Taylor2 min(const Taylor2& a, const Taylor2& b);
Taylor2 max(const Taylor2& a, const Taylor2& b);

/// Integer power by repeated multiplication; same operation order for every scalar type.
template <class T>
T ipow_generic(const T& a, int e) {
  if (e < 0) {
    return 1.0 / ipow_generic(a, -e);
  }
  if (e == 0) {
    return a * 0.0 + 1.0;
  }
  T out = a;
  for (int i = 1; i < e; ++i) {
    out = out * a;
  }
  return out;
}

inline double ipow(double a, int e) { return ipow_generic(a, e); }

/// Scalar-type traits used by the templated field evaluators.
inline double value_of(double x) { return x; }
inline double value_of(const Taylor2& x) { return x.value(); }

} // namespace subriem
