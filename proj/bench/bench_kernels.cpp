#include "subriem/hcalc.hpp"
#include "subriem/kernels.hpp"
#include "subriem/liouville.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

using namespace subriem;

// Residual of the sub-Laplacian applied to rho^{2-Q} at one shell sample.
double harmonic_residual(const GeometrySpec& g, const Expr& u, const OperatorSpec& op, std::size_t i) {
  auto rng = sample_rng(0xC0FFEE, 7, i);
  const Point p = shell_sample(g, rng, 1.0, 100.0);
  return pde_residual(g, op, u, p);
}

struct Fixture {
  GeometrySpec g = GeometrySpec::htype7();
  Expr u;
  OperatorSpec op;
  Fixture() {
    u = parse("rho^-8", g);
    op.kind = SecondOrderKind::NegTraceA;
    op.a = parse("1", g);
  }
};

void bm_residual_serial(benchmark::State& state) {
  Fixture fx;
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto r = map_samples_serial<double>(n, [&](std::size_t i) { return harmonic_residual(fx.g, fx.u, fx.op, i); });
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_residual_parallel(benchmark::State& state) {
  Fixture fx;
  const auto n = static_cast<std::size_t>(state.range(0));
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto r = map_samples_parallel<double>(n, [&](std::size_t i) { return harmonic_residual(fx.g, fx.u, fx.op, i); }, workers);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_check_condition(benchmark::State& state) {
  const GeometrySpec g = GeometrySpec::htype7();
  OperatorSpec op;
  op.kind = SecondOrderKind::MMinus;
  Coefficient c;
  c.b.entries.assign(4, parse("0", g));
  c.c = parse("0.5", g);
  op.coeffs.entries.push_back(c);
  SamplePlan plan;
  plan.per_rung = 200;
  plan.workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto rep = check_condition("condH", g, op, plan);
    benchmark::DoNotOptimize(rep.min_margin);
  }
}

} // namespace

BENCHMARK(bm_residual_serial)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_residual_parallel)->Args({4096, 1})->Args({4096, 4})->Args({4096, 0})->Unit(benchmark::kMillisecond);
BENCHMARK(bm_check_condition)->Arg(1)->Arg(4)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
