#include "oracles.hpp"

#include "subriem/config.hpp"
#include "subriem/liouville.hpp"

#include <doctest.h>

using namespace subriem;

TEST_SUITE("growth") {

TEST_CASE("trend classification") {
  CHECK(classify_trend({1.0, 2.0}) == Trend::Undetermined);
  CHECK(classify_trend({5.0, 1.0, 1.02, 0.98}) == Trend::Bounded);
  CHECK(classify_trend({0.0, 0.0, 0.0}) == Trend::Bounded);
  CHECK(classify_trend({1.0, 2.5, 6.0}) == Trend::Diverging);
  CHECK(classify_trend({1.0, 1.9, 6.0}) == Trend::Undetermined);
  CHECK(classify_trend({1.0, 2.0, std::numeric_limits<double>::infinity()}) == Trend::Diverging);
  CHECK(classify_trend({1.0, 0.5, 0.25}) == Trend::Undetermined);
}

TEST_CASE("halton sequence") {
  CHECK(halton(1, 2) == 0.5);
  CHECK(halton(2, 2) == 0.25);
  CHECK(halton(3, 2) == 0.75);
  CHECK(halton(1, 3) == doctest::Approx(1.0 / 3.0));
  CHECK(first_primes(5) == std::vector<int>{2, 3, 5, 7, 11});
}

TEST_CASE("decaying solution: bounded at the critical scale, diverging above it") {
  const RunConfig cfg = load_config(read_json_file(std::string(SUBRIEM_SOURCE_DIR) + "/configs/growth_u1.json"));
  const Expr u = parse(cfg.growth.u, cfg.geometry);
  const auto r = growth_probe(cfg.geometry, u, cfg.growth.c, cfg.growth.nu, cfg.plan, cfg.growth.options);
  REQUIRE(r.rungs.size() == 7);
  CHECK(r.Q == 10.0);
  CHECK(r.trend_q2 == Trend::Bounded);
  CHECK(r.trend_nu == Trend::Diverging);
  for (const auto& g : r.rungs) {
    // (1+rho^2)^-4 is radial, so the shell sup sits on the inner sphere.
    CHECK(g.sup == doctest::Approx(std::pow(1.0 + g.r * g.r, -4.0)).epsilon(1e-9));
    CHECK(gauge(cfg.geometry, g.argmax) == doctest::Approx(g.r).epsilon(1e-9));
    CHECK_FALSE(g.overflow);
  }
  const auto j = to_json(r);
  CHECK(j["trend_q2"] == "bounded");
  CHECK(j["rungs"].size() == 7);
}

TEST_CASE("non-radial sup is found by refinement") {
  const auto g = GeometrySpec::heisenberg(1);
  SamplePlan plan;
  plan.per_rung = 128;
  plan.rungs = 4;
  plan.r0 = 1.0;
  const Expr u = parse("x1 / (1 + rho^2)", g);
  const auto r = growth_probe(g, u, 0.0, 0.5, plan);
  for (const auto& row : r.rungs) {
    // sup of x1 on rho = r is r (at x1 = r, t = 0), and f(r) = r/(1+r^2) decreases for r >= 1
    const double expect = row.r / (1.0 + row.r * row.r);
    CHECK(row.sup <= expect * (1.0 + 1e-12));
    CHECK(row.sup >= 0.95 * expect);
  }
}

TEST_CASE("probe results are reproducible across worker counts") {
  const auto g = GeometrySpec::htype7();
  SamplePlan plan;
  plan.per_rung = 64;
  plan.rungs = 3;
  plan.r0 = 2.0;
  const Expr u = parse("x1 * x5 / (1 + rho^4)", g);
  plan.workers = 1;
  const auto a = to_json(growth_probe(g, u, 0.0, 0.5, plan)).dump();
  plan.workers = 8;
  CHECK(to_json(growth_probe(g, u, 0.0, 0.5, plan)).dump() == a);
}

}
