#include "subriem/taylor.hpp"

namespace subriem {

Taylor2 Taylor2::variable(double value, int dim, int index) {
  Taylor2 t(value, dim);
  t.grad_(index) = 1.0;
  return t;
}

Taylor2 Taylor2::compose(double f, double df, double d2f) const {
  Eigen::VectorXd g = df * grad_;
  Eigen::MatrixXd h = df * hess_ + d2f * (grad_ * grad_.transpose());
  return Taylor2(f, std::move(g), std::move(h), nonsmooth_);
}

Taylor2 Taylor2::operator-() const { return Taylor2(-value_, -grad_, -hess_, nonsmooth_); }

Taylor2& Taylor2::operator+=(const Taylor2& o) {
  value_ += o.value_;
  grad_ += o.grad_;
  hess_ += o.hess_;
  nonsmooth_ = nonsmooth_ || o.nonsmooth_;
  return *this;
}

Taylor2& Taylor2::operator-=(const Taylor2& o) {
  value_ -= o.value_;
  grad_ -= o.grad_;
  hess_ -= o.hess_;
  nonsmooth_ = nonsmooth_ || o.nonsmooth_;
  return *this;
}

Taylor2& Taylor2::operator*=(const Taylor2& o) {
  Eigen::MatrixXd cross = grad_ * o.grad_.transpose();
  hess_ = value_ * o.hess_ + o.value_ * hess_ + cross + cross.transpose();
  grad_ = value_ * o.grad_ + o.value_ * grad_;
  value_ *= o.value_;
  nonsmooth_ = nonsmooth_ || o.nonsmooth_;
  return *this;
}

Taylor2& Taylor2::operator/=(const Taylor2& o) {
  // a/b = a * (1/b); the value slot is a single division to match double evaluation.
  const double inv = 1.0 / o.value_;
  Taylor2 recip = o.compose(inv, -inv * inv, 2.0 * inv * inv * inv);
  const double quotient = value_ / o.value_;
  *this *= recip;
  value_ = quotient;
  return *this;
}

Taylor2 operator+(Taylor2 a, const Taylor2& b) { return a += b; }
Taylor2 operator-(Taylor2 a, const Taylor2& b) { return a -= b; }
Taylor2 operator*(const Taylor2& a, const Taylor2& b) {
  Taylor2 out = a;
  out *= b;
  return out;
}
Taylor2 operator/(const Taylor2& a, const Taylor2& b) {
  Taylor2 out = a;
  out /= b;
  return out;
}

Taylor2 operator+(Taylor2 a, double b) { return Taylor2(a.value() + b, a.grad(), a.hess(), a.nonsmooth()); }
Taylor2 operator+(double a, Taylor2 b) { return Taylor2(a + b.value(), b.grad(), b.hess(), b.nonsmooth()); }
Taylor2 operator-(Taylor2 a, double b) { return Taylor2(a.value() - b, a.grad(), a.hess(), a.nonsmooth()); }
Taylor2 operator-(double a, const Taylor2& b) { return Taylor2(a - b.value(), -b.grad(), -b.hess(), b.nonsmooth()); }
Taylor2 operator*(Taylor2 a, double b) { return Taylor2(a.value() * b, a.grad() * b, a.hess() * b, a.nonsmooth()); }
Taylor2 operator*(double a, Taylor2 b) { return Taylor2(a * b.value(), a * b.grad(), a * b.hess(), b.nonsmooth()); }
Taylor2 operator/(Taylor2 a, double b) {
  return Taylor2(a.value() / b, a.grad() / b, a.hess() / b, a.nonsmooth());
}
Taylor2 operator/(double a, const Taylor2& b) {
  const double inv = 1.0 / b.value();
  Taylor2 out = b.compose(a / b.value(), -a * inv * inv, 2.0 * a * inv * inv * inv);
  return out;
}

Taylor2 sqrt(const Taylor2& a) {
  const double s = std::sqrt(a.value());
  return a.compose(s, 0.5 / s, -0.25 / (s * a.value()));
}

Taylor2 log(const Taylor2& a) {
  const double v = a.value();
  return a.compose(std::log(v), 1.0 / v, -1.0 / (v * v));
}

Taylor2 exp(const Taylor2& a) {
  const double e = std::exp(a.value());
  return a.compose(e, e, e);
}

Taylor2 abs(const Taylor2& a) {
  Taylor2 out = a.value() < 0.0 ? -a : a;
  if (a.value() == 0.0) {
    out.mark_nonsmooth();
  }
  return out;
}

Taylor2 pow(const Taylor2& a, double e) {
  const double v = a.value();
  const double f = std::pow(v, e);
  const double df = e == 0.0 ? 0.0 : e * std::pow(v, e - 1.0);
  const double d2f = (e == 0.0 || e == 1.0) ? 0.0 : e * (e - 1.0) * std::pow(v, e - 2.0);
  return a.compose(f, df, d2f);
}

Taylor2 ipow(const Taylor2& a, int e) { return ipow_generic(a, e); }

Taylor2 min(const Taylor2& a, const Taylor2& b) {
  Taylor2 out = a.value() < b.value() ? a : b;
  if (a.value() == b.value()) {
    out.mark_nonsmooth();
  }
  return out;
}

Taylor2 max(const Taylor2& a, const Taylor2& b) {
  Taylor2 out = a.value() > b.value() ? a : b;
  if (a.value() == b.value()) {
    out.mark_nonsmooth();
  }
  return out;
}

} // namespace subriem
