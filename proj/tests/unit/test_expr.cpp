#include "oracles.hpp"

#include "subriem/expr.hpp"
#include "subriem/extremal.hpp"

#include <doctest.h>

using namespace subriem;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) {
    p(i++) = x;
  }
  return p;
}

// Parses on the given geometry and reports the error position, or (0, 0) on success.
std::pair<int, int> error_at(const std::string& src, const GeometrySpec& g) {
  try {
    parse(src, g);
  } catch (const ParseError& e) {
    return {e.line(), e.column()};
  }
  return {0, 0};
}

const std::vector<std::string>& corpus() {
  static const std::vector<std::string> c = {
      "x1",
      "x1 + x2",
      "x1 - x2 - x3",
      "x1 * x2 / x3",
      "x1^2 + 4*x2^2",
      "-x1^2",
      "(-x1)^2",
      "-(x1 + x2)",
      "--x1",
      "2^-1",
      "x1^-2.5",
      "x1^+3",
      "rho",
      "log(rho)",
      "-log(rho)",
      "rho^2",
      "rho^-8",
      "(1+rho^2)^-4",
      "(1+rho^2)^-0.05",
      "xh",
      "xv",
      "xh^2 / rho^4",
      "sqrt(x1^2 + x2^2 + 1)",
      "exp(-x1^2)",
      "abs(x1 - x2)",
      "min(x1, x2)",
      "max(x1, x2, x3)",
      "min(max(x1, 0), 1)",
      "log(1 + rho^2) * exp(x3)",
      "1e-3 * x1",
      "2.5e+2",
      ".5 * x2",
      "x1 * (x2 + x3) * (x1 - x3)",
      "(x1 + x2) / (1 + x3^2)",
      "x1 / x2 / x3",
      "x1 - (x2 - x3)",
      "1 - x1 + x2",
      "3 * -x1",
      "-3 * x1",
      "x1^2 * x2^3",
      "rho^4 * log(rho)",
      "log(rho) / rho",
      "0.5",
      "0",
      "sqrt(rho)",
      "exp(log(rho))",
      "abs(-x1)",
      "max(rho, 1)",
      "(x1)",
      "((x1 + 1))",
      "x1^2 + x2^2 + x3^2 - rho^2",
      "x5 * x6 - x7",
      "log(2 + x4^2)",
      "min(x1, x2) + max(x3, x4)",
  };
  return c;
}

} // namespace

TEST_SUITE("expr") {

TEST_CASE("evaluation examples") {
  const auto gp = GeometrySpec::grushin_plane();
  CHECK(eval(parse("x1^2 + 4*x2^2", gp), pt({1, 1})) == 5.0);
  const auto t = GeometrySpec::htype7();
  CHECK(eval(parse("log(rho)", t), pt({1, 0, 0, 0, 0, 0, 0})) == doctest::Approx(0.0));
  CHECK(eval(parse("-x1^2", gp), pt({3, 0})) == -9.0);
  CHECK(eval(parse("2^-1", gp), pt({0, 0})) == 0.5);
  CHECK(eval(parse("max(x1, x2, 7)", gp), pt({3, 5})) == 7.0);
  CHECK(eval(parse("xh", t), pt({3, 4, 0, 0, 1, 1, 1})) == 5.0);
  CHECK(eval(parse("xv", t), pt({3, 4, 0, 0, 0, 3, 4})) == 5.0);
}

TEST_CASE("parse errors carry positions") {
  const auto gp = GeometrySpec::grushin_plane();
  CHECK(error_at("x9", gp) == std::pair<int, int>{1, 1});
  CHECK(error_at("x1 + foo", gp) == std::pair<int, int>{1, 6});
  CHECK(error_at("log(x1, x2)", gp).first == 1);
  CHECK(error_at("x1 $ 2", gp) == std::pair<int, int>{1, 4});
  CHECK(error_at("x1 +\n  @", gp) == std::pair<int, int>{2, 3});
  CHECK(error_at("x1^x2", gp).first == 1);
  CHECK(error_at("x1^2^3", gp).first == 1);
  CHECK(error_at("(x1 + 1", gp).first == 1);
  CHECK(error_at("", gp).first == 1);
  CHECK(error_at("x0", gp).first == 1);
  CHECK(error_at("x1 x2", gp).first == 1);
}

TEST_CASE("domain errors at evaluation") {
  const auto gp = GeometrySpec::grushin_plane();
  CHECK_THROWS_AS(eval(parse("log(x1)", gp), pt({-1, 0})), EvalError);
  CHECK_THROWS_AS(eval(parse("sqrt(x1)", gp), pt({-1, 0})), EvalError);
  CHECK_THROWS_AS(eval(parse("1 / x1", gp), pt({0, 0})), EvalError);
  CHECK_THROWS_AS(eval(parse("x1^0.5", gp), pt({-2, 0})), EvalError);
  CHECK_THROWS_AS(eval_taylor(parse("log(x1)", gp), pt({0, 1})), EvalError);
}

TEST_CASE("taylor examples") {
  const auto t = GeometrySpec::htype7();
  const Point p = pt({0.3, -0.7, 1.1, 0.2, 0.5, -0.4, 0.9});
  const Taylor2 a = eval_taylor(parse("x1*x2", t), p);
  CHECK(a.grad()(0) == doctest::Approx(-0.7));
  CHECK(a.grad()(1) == doctest::Approx(0.3));
  CHECK(a.grad().tail(5).norm() == 0.0);
  CHECK(a.hess()(0, 1) == 1.0);
  CHECK(a.hess()(1, 0) == 1.0);
  CHECK(std::abs(a.hess().sum() - 2.0) == 0.0);

  // D rho = (2|x_H|^2 x_H, x_V) / (2 rho^3) on HType7.
  const Taylor2 r = eval_taylor(parse("rho", t), p);
  const double xh2 = p.head(4).squaredNorm();
  const double rho = std::pow(xh2 * xh2 + p.tail(3).squaredNorm(), 0.25);
  Eigen::VectorXd expect(7);
  expect << 2.0 * xh2 * p.head(4), p.tail(3);
  expect /= 2.0 * rho * rho * rho;
  CHECK((r.grad() - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("log rho on the Grushin plane matches finite differences") {
  const auto gp = GeometrySpec::grushin_plane();
  const Expr e = parse("log(rho)", gp);
  for (const auto& p : oracle::shell_points(gp, 20, 0.5, 4.0, 77)) {
    const Taylor2 t = eval_taylor(e, p);
    auto f = [&](const Point& q) { return eval(e, q); };
    const Eigen::VectorXd g = oracle::fd_gradient(f, p);
    const Eigen::MatrixXd H = oracle::fd_hessian(f, p);
    CHECK((t.grad() - g).norm() <= 1e-6 * std::max(1.0, g.norm()));
    CHECK((t.hess() - H).norm() <= 1e-6 * std::max(1.0, H.norm()));
  }
}

TEST_CASE("corpus round trip, value parity and finite differences") {
  const auto t = GeometrySpec::htype7();
  // Coordinates bounded away from zero keep the difference quotients well conditioned.
  std::vector<Point> pts;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mag(0.4, 1.4);
  std::bernoulli_distribution flip(0.5);
  for (int k = 0; k < 5; ++k) {
    Point p(7);
    for (int i = 0; i < 7; ++i) {
      p(i) = flip(rng) ? -mag(rng) : mag(rng);
    }
    pts.push_back(p);
  }
  REQUIRE(corpus().size() >= 50);
  for (const auto& src : corpus()) {
    CAPTURE(src);
    const Expr e = parse(src, t);
    const Expr back = parse(print(e), t);
    CHECK(structurally_equal(e, back));
    CHECK(print(back) == print(e));
    for (const auto& p : pts) {
      double v = 0.0;
      try {
        v = eval(e, p);
      } catch (const EvalError&) {
        CHECK_THROWS_AS(eval_taylor(e, p), EvalError);
        continue;
      }
      const Taylor2 tv = eval_taylor(e, p);
      CHECK(tv.value() == v);
      if (tv.nonsmooth()) {
        continue;
      }
      auto f = [&](const Point& q) { return eval(e, q); };
      const Eigen::VectorXd g = oracle::fd_gradient(f, p);
      const Eigen::MatrixXd H = oracle::fd_hessian(f, p);
      CHECK((tv.grad() - g).norm() <= 1e-6 * std::max(1.0, g.norm()));
      CHECK((tv.hess() - H).norm() <= 1e-6 * std::max(1.0, H.norm()));
    }
  }
}

TEST_CASE("precedence") {
  const auto gp = GeometrySpec::grushin_plane();
  CHECK(print(parse("-x1^2", gp)) != print(parse("(-x1)^2", gp)));
  CHECK(eval(parse("1 - 2 - 3", gp), pt({0, 0})) == -4.0);
  CHECK(eval(parse("8 / 4 / 2", gp), pt({0, 0})) == 1.0);
  CHECK(eval(parse("2 * 3 + 4", gp), pt({0, 0})) == 10.0);
  CHECK(eval(parse("2 + 3 * 4", gp), pt({0, 0})) == 14.0);
}

TEST_CASE("kinks flag nonsmooth") {
  const auto gp = GeometrySpec::grushin_plane();
  CHECK(eval_taylor(parse("abs(x1 - x2)", gp), pt({1, 1})).nonsmooth());
  CHECK(eval_taylor(parse("min(x1, x2)", gp), pt({1, 1})).nonsmooth());
  CHECK_FALSE(eval_taylor(parse("min(x1, x2)", gp), pt({1, 2})).nonsmooth());
}

TEST_CASE("radial and operator contexts") {
  const Expr f = parse_radial("rho^3 + log(rho)");
  const Taylor2 v = eval_radial(f, 2.0);
  CHECK(v.value() == doctest::Approx(8.0 + std::log(2.0)));
  CHECK(v.grad()(0) == doctest::Approx(12.0 + 0.5));
  CHECK(v.hess()(0, 0) == doctest::Approx(12.0 - 0.25));
  CHECK_THROWS_AS(parse_radial("x1"), ParseError);

  const auto gp = GeometrySpec::grushin_plane();
  const Expr G = parse_operator("mplus(1, 2) + r * p1 - M1_2", gp, 2);
  OperatorArgs a;
  a.x = pt({0.5, 0.5});
  a.r = 2.0;
  a.p = Eigen::Vector2d(3.0, 0.0);
  a.M = Eigen::Matrix2d::Identity();
  a.M(0, 1) = a.M(1, 0) = 0.25;
  CHECK(eval_operator(G, a) == doctest::Approx(pucci_plus(Ellipticity{1, 2}, a.M) + 6.0 - 0.25));
  CHECK_THROWS_AS(parse_operator("M3_1", gp, 2), ParseError);
}

TEST_CASE("vector expressions") {
  const auto gp = GeometrySpec::grushin_plane();
  VectorExpr b;
  b.entries = {parse("x1", gp), parse("2*x2", gp)};
  const Eigen::VectorXd v = b.eval(pt({1, 3}), 2);
  CHECK(v(0) == 1.0);
  CHECK(v(1) == 6.0);
  CHECK_THROWS(b.eval(pt({1, 3}), 3));
  VectorExpr z;
  CHECK(z.is_zero());
  CHECK(z.eval(pt({1, 3}), 2).norm() == 0.0);
}

}
