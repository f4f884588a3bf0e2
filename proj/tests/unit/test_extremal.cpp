#include "oracles.hpp"

#include "subriem/expr.hpp"
#include "subriem/extremal.hpp"
#include "subriem/hcalc.hpp"

#include <doctest.h>

using namespace subriem;

namespace {

// -sup over lambda I <= A <= Lambda I of Tr(A M), by the sign split of the spectrum.
double pucci_plus_oracle(const Ellipticity& ell, const Eigen::MatrixXd& M) {
  double out = 0.0;
  for (double e : oracle::jacobi_eigenvalues(M)) {
    out += e > 0 ? -ell.lambda * e : -ell.Lambda * e;
  }
  return out;
}

Eigen::MatrixXd random_psd(std::mt19937_64& rng, int m) {
  const Eigen::MatrixXd A = oracle::random_symmetric(rng, m);
  return A * A.transpose();
}

} // namespace

TEST_SUITE("extremal") {

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(Ellipticity{1, 2}.validate());
  CHECK_THROWS_AS((Ellipticity{2, 1}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((Ellipticity{0, 1}.validate()), std::invalid_argument);
  CHECK_NOTHROW((Pucci66Param{0.25, 4}.validate()));
  CHECK_THROWS_AS((Pucci66Param{0.3, 4}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((Pucci66Param{0.0, 4}.validate()), std::invalid_argument);
}

TEST_CASE("spectrum against the Jacobi oracle") {
  std::mt19937_64 rng(2024);
  for (int m = 1; m <= 8; ++m) {
    for (int k = 0; k < 30; ++k) {
      const Eigen::MatrixXd M = oracle::random_symmetric(rng, m, 3.0);
      const Spectrum s = spectrum(M);
      const auto ref = oracle::jacobi_eigenvalues(M);
      REQUIRE(s.eigenvalues.size() == ref.size());
      for (std::size_t i = 0; i < ref.size(); ++i) {
        CHECK(s.eigenvalues[i] == doctest::Approx(ref[i]).epsilon(1e-12).scale(1.0 + M.norm()));
      }
      CHECK(s.residual <= 1e-10 * (1.0 + M.norm()));
      CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
    }
  }
  CHECK(spectrum(Eigen::MatrixXd::Zero(3, 3)).eigenvalues == std::vector<double>{0.0, 0.0, 0.0});
  Eigen::MatrixXd N = Eigen::MatrixXd::Identity(3, 3);
  N(0, 1) = 1.0;
  CHECK_THROWS_AS(spectrum(N), std::invalid_argument);
}

TEST_CASE("rank-2 lemma against the dense solvers") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int m = 4; m <= 7; ++m) {
    for (int k = 0; k < 100; ++k) {
      const double s = nd(rng), a = nd(rng), b = nd(rng), c = nd(rng);
      const Eigen::VectorXd v = oracle::random_unit(rng, m);
      const Eigen::VectorXd w = oracle::random_unit(rng, m);
      const auto closed = rank2_eigenvalues(s, a, b, c, v, w).eigenvalues;
      const auto ref = oracle::jacobi_eigenvalues(rank2_matrix(s, a, b, c, v, w));
      REQUIRE(closed.size() == ref.size());
      for (std::size_t i = 0; i < ref.size(); ++i) {
        CHECK(std::abs(closed[i] - ref[i]) <= 1e-10);
      }
    }
  }
}

TEST_CASE("rank-2 lemma degenerate cases") {
  const Eigen::VectorXd v = Eigen::VectorXd::Unit(5, 0);
  const Eigen::VectorXd w = Eigen::VectorXd::Unit(5, 1);
  const auto z = rank2_eigenvalues(1.5, 0, 0, 0, v, w).eigenvalues;
  CHECK(z == std::vector<double>(5, 1.5));
  // c^2 = ab: the perturbation has rank one.
  const auto r1 = rank2_eigenvalues(0.5, 4.0, 1.0, 2.0, v, w).eigenvalues;
  std::vector<double> expect(4, 0.5);
  expect.push_back(0.5 + 4.0 + 1.0);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(r1[i] == doctest::Approx(expect[i]));
  }
  // v = w
  const auto vv = rank2_eigenvalues(1.0, 1.0, 2.0, 0.5, v, v).eigenvalues;
  CHECK(vv.back() == doctest::Approx(1.0 + 1.0 + 2.0 + 1.0));
  CHECK(vv.front() == doctest::Approx(1.0));
  CHECK_THROWS_AS(rank2_eigenvalues(1, 1, 1, 1, 2.0 * v, w), std::invalid_argument);
}

TEST_CASE("grushin plane eigenvalues of the log-gauge hessian") {
  const auto g = GeometrySpec::grushin_plane();
  const Expr u = parse("log(rho)", g);
  for (const auto& p : oracle::shell_points(g, 100, 0.5, 5.0, 40)) {
    const double x = p(0), y = p(1);
    const double rho = gauge(g, p);
    const Spectrum s = spectrum(horizontal_jet(g, u, p).hhess);
    const double r4 = std::pow(rho, 4);
    const double root = std::sqrt(9 * std::pow(x, 4) + 4 * y * y);
    CHECK(s.eigenvalues[0] == doctest::Approx((x * x - root) / (2 * r4)).epsilon(1e-10));
    CHECK(s.eigenvalues[1] == doctest::Approx((x * x + root) / (2 * r4)).epsilon(1e-10));
    CHECK(s.eigenvalues[0] + s.eigenvalues[1] == doctest::Approx(x * x / r4).epsilon(1e-10));
    CHECK(s.eigenvalues[0] * s.eigenvalues[1] == doctest::Approx((-2 * std::pow(x, 4) - y * y) / (r4 * r4)).epsilon(1e-10));
  }
}

TEST_CASE("pucci operators") {
  std::mt19937_64 rng(99);
  const Ellipticity one{1, 1};
  const Ellipticity ell{0.5, 3.0};
  for (int m = 1; m <= 7; ++m) {
    for (int k = 0; k < 50; ++k) {
      const Eigen::MatrixXd M = oracle::random_symmetric(rng, m);
      const Eigen::MatrixXd N = random_psd(rng, m);
      const Eigen::MatrixXd B = oracle::random_symmetric(rng, m);
      const double tol = 1e-11 * (1.0 + M.norm() + N.norm() + B.norm());
      CHECK(pucci_plus(one, M) == doctest::Approx(-M.trace()).epsilon(1e-12).scale(1.0 + M.norm()));
      CHECK(pucci_minus(one, M) == doctest::Approx(-M.trace()).epsilon(1e-12).scale(1.0 + M.norm()));
      CHECK(pucci_plus(ell, M) == doctest::Approx(-pucci_minus(ell, Eigen::MatrixXd(-M))).epsilon(1e-13).scale(1.0 + M.norm()));
      CHECK(pucci_plus(ell, M) == doctest::Approx(pucci_plus_oracle(ell, M)).epsilon(1e-12).scale(1.0 + M.norm()));
      CHECK(pucci_plus(ell, M) >= pucci_minus(ell, M) - tol);
      CHECK(pucci_plus(ell, M + N) <= pucci_plus(ell, M) + tol);
      CHECK(pucci_minus(ell, M + N) <= pucci_minus(ell, M) + tol);
      CHECK(pucci_minus(ell, M) + pucci_minus(ell, B) <= pucci_minus(ell, M + B) + tol);
      CHECK(pucci_minus(ell, M + B) <= pucci_minus(ell, M) + pucci_plus(ell, B) + tol);
    }
  }
  CHECK(pucci_plus(ell, Eigen::MatrixXd::Zero(3, 3)) == 0.0);
  CHECK(pucci_minus(ell, Eigen::MatrixXd::Zero(3, 3)) == 0.0);
}

TEST_CASE("pucci on htype7 radial profiles") {
  const auto g = GeometrySpec::htype7();
  const double Q = 10.0;
  const Ellipticity ell{1.0, 2.5};
  // f concave increasing: f = -rho^-1; convex increasing: f = rho^2.
  for (const auto& p : oracle::shell_points(g, 200, 0.3, 30.0, 41)) {
    const double rho = gauge(g, p);
    const double n2 = gauge_hgrad_norm_sq_closed(g, p);
    const RadialProfile f = profile_power(-1.0);
    RadialProfile cc{"-rho^-1", [&](double r) { return -f.f(r); }, [&](double r) { return -f.df(r); },
                     [&](double r) { return -f.d2f(r); }};
    const Eigen::MatrixXd H = radial_horizontal_hessian(g, cc, p).hhess;
    const double expect = -n2 * (ell.lambda * (Q - 1.0) * cc.df(rho) / rho + ell.Lambda * cc.d2f(rho));
    CHECK(pucci_plus(ell, H) == doctest::Approx(expect).epsilon(1e-9).scale(1.0 + H.norm()));
    const RadialProfile cv = profile_power(2.0);
    const Eigen::MatrixXd H2 = radial_horizontal_hessian(g, cv, p).hhess;
    const double expect2 = -n2 * ell.lambda * ((Q - 1.0) * cv.df(rho) / rho + cv.d2f(rho));
    CHECK(pucci_plus(ell, H2) == doctest::Approx(expect2).epsilon(1e-9).scale(1.0 + H2.norm()));
  }
}

TEST_CASE("pucci 1966 operators") {
  std::mt19937_64 rng(5);
  for (int m = 2; m <= 6; ++m) {
    const Pucci66Param uni{1.0 / m, m};
    const Pucci66Param p{0.5 / m, m};
    for (int k = 0; k < 30; ++k) {
      const Eigen::MatrixXd M = oracle::random_symmetric(rng, m);
      CHECK(pucci66_plus(uni, M) == doctest::Approx(-M.trace() / m).epsilon(1e-12));
      CHECK(pucci66_minus(uni, M) == doctest::Approx(-M.trace() / m).epsilon(1e-12));
      CHECK(pucci66_plus(p, M) >= pucci66_minus(p, M) - 1e-12);
      const auto e = oracle::jacobi_eigenvalues(M);
      CHECK(pucci66_plus(p, M) == doctest::Approx(-p.lam * M.trace() - (1 - m * p.lam) * e.front()).epsilon(1e-11));
      CHECK(pucci66_minus(p, M) == doctest::Approx(-p.lam * M.trace() - (1 - m * p.lam) * e.back()).epsilon(1e-11));
    }
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
    CHECK(pucci66_plus(p, I) == doctest::Approx(-1.0));
    CHECK(pucci66_minus(p, I) == doctest::Approx(-1.0));
  }
}

TEST_CASE("pucci 1966 minus on the free group log-gauge hessian") {
  const auto g = GeometrySpec::free_step2(3);
  const Pucci66Param p{0.2, 3};
  const Expr u = parse("log(rho)", g);
  for (const auto& pt : oracle::shell_points(g, 100, 0.5, 10.0, 42)) {
    const double rho = gauge(g, pt);
    const HorizontalJet j = horizontal_jet(g, u, pt);
    const double dr2 = j.hgrad.squaredNorm() * rho * rho;
    const double expect = 4.0 * p.lam * dr2 / (rho * rho) - 3.0 * pt.head(3).squaredNorm() / std::pow(rho, 4);
    CHECK(pucci66_minus(p, j.hhess) == doctest::Approx(expect).epsilon(1e-10).scale(1.0 + j.hhess.norm()));
  }
}

TEST_CASE("subellipticity probe") {
  const auto g = GeometrySpec::grushin_plane();
  SamplePlan plan;
  plan.per_rung = 200;
  plan.rungs = 1;
  const auto a = subellipticity_probe(parse_operator("-(M1_1 + M2_2)", g, 2), Ellipticity{1, 1}, plan);
  CHECK(a.verdict == Verdict::Holds);
  CHECK(std::abs(a.min_margin) < 1e-9);
  const auto b = subellipticity_probe(parse_operator("mplus(1, 2) + x1 * p1 + r^2", g, 2), Ellipticity{1, 2}, plan);
  CHECK(b.verdict == Verdict::Holds);
  const auto c = subellipticity_probe(parse_operator("-4 * (M1_1 + M2_2)", g, 2), Ellipticity{1, 2}, plan);
  CHECK(c.verdict == Verdict::Violated);
  CHECK_FALSE(c.witnesses.empty());
}

}
