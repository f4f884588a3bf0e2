#include "oracles.hpp"

#include "subriem/taylor.hpp"

#include <doctest.h>

using namespace subriem;

namespace {

std::vector<Taylor2> vars(const Point& p) {
  std::vector<Taylor2> v;
  for (int i = 0; i < p.size(); ++i) {
    v.push_back(Taylor2::variable(p(i), static_cast<int>(p.size()), i));
  }
  return v;
}

} // namespace

TEST_SUITE("taylor") {

TEST_CASE("product rule on x1*x2") {
  Point p(3);
  p << 1.5, -2.0, 0.25;
  const auto x = vars(p);
  const Taylor2 t = x[0] * x[1];
  CHECK(t.value() == doctest::Approx(-3.0));
  CHECK(t.grad()(0) == doctest::Approx(-2.0));
  CHECK(t.grad()(1) == doctest::Approx(1.5));
  CHECK(t.grad()(2) == 0.0);
  CHECK(t.hess()(0, 1) == 1.0);
  CHECK(t.hess()(1, 0) == 1.0);
  CHECK(t.hess()(0, 0) == 0.0);
}

TEST_CASE("elementary functions agree with finite differences") {
  Point p(3);
  p << 0.7, 1.3, -0.4;
  auto f_t = [](const std::vector<Taylor2>& x) {
    return log(x[0] * x[0] + x[1] * x[1] + 1.0) * exp(x[2]) + sqrt(x[1] + 2.0) / (x[0] + 3.0) + pow(x[1], 2.5) -
           ipow(x[2], 3);
  };
  auto f_d = [](const Point& x) {
    return std::log(x(0) * x(0) + x(1) * x(1) + 1.0) * std::exp(x(2)) + std::sqrt(x(1) + 2.0) / (x(0) + 3.0) +
           std::pow(x(1), 2.5) - x(2) * x(2) * x(2);
  };
  const Taylor2 t = f_t(vars(p));
  CHECK(t.value() == doctest::Approx(f_d(p)).epsilon(1e-14));
  const Eigen::VectorXd g = oracle::fd_gradient(f_d, p);
  const Eigen::MatrixXd H = oracle::fd_hessian(f_d, p);
  CHECK((t.grad() - g).cwiseAbs().maxCoeff() < 1e-7);
  CHECK((t.hess() - H).cwiseAbs().maxCoeff() < 1e-5);
  CHECK((t.hess() - t.hess().transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("value slot matches plain double evaluation bit for bit") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int k = 0; k < 200; ++k) {
    Point p(2);
    p << u(rng), u(rng);
    const auto x = vars(p);
    const Taylor2 t = (x[0] * x[1] + 1.0) / sqrt(x[0]) - log(x[1]) * 2.0;
    const double d = (p(0) * p(1) + 1.0) / std::sqrt(p(0)) - std::log(p(1)) * 2.0;
    CHECK(t.value() == d);
  }
}

TEST_CASE("abs at a kink flags nonsmooth") {
  Point p(1);
  p << 0.0;
  const auto x = vars(p);
  CHECK(abs(x[0]).nonsmooth());
  CHECK_FALSE(abs(x[0] + 1.0).nonsmooth());
  CHECK(max(x[0], x[0] * 2.0).nonsmooth());
}

TEST_CASE("integer powers and compose") {
  Point p(1);
  p << 1.7;
  const auto x = vars(p);
  const Taylor2 a = ipow(x[0], -3);
  CHECK(a.value() == doctest::Approx(std::pow(1.7, -3)));
  CHECK(a.grad()(0) == doctest::Approx(-3.0 * std::pow(1.7, -4)));
  CHECK(a.hess()(0, 0) == doctest::Approx(12.0 * std::pow(1.7, -5)));
  const Taylor2 c = x[0].compose(std::sin(1.7), std::cos(1.7), -std::sin(1.7));
  CHECK(c.grad()(0) == doctest::Approx(std::cos(1.7)));
  CHECK(c.hess()(0, 0) == doctest::Approx(-std::sin(1.7)));
}

TEST_CASE("division and sqrt chain rules") {
  Point p(2);
  p << 2.0, 3.0;
  const auto x = vars(p);
  const Taylor2 q = sqrt(x[0] / x[1]);
  auto f = [](const Point& y) { return std::sqrt(y(0) / y(1)); };
  CHECK((q.grad() - oracle::fd_gradient(f, p)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((q.hess() - oracle::fd_hessian(f, p)).cwiseAbs().maxCoeff() < 1e-6);
}

}
