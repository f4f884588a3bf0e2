#pragma once

#include "subriem/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace subriem {

/// Sampling and tolerance settings shared by every sampled check.
struct SamplePlan {
  std::uint64_t seed = 0xC0FFEE;
  int per_rung = 1000;
  int rungs = 6;
  double r0 = 1.0;
  double eps_sing = 1e-3;
  double max_excluded_fraction = 0.25;
  double abs_tol = 1e-12;
  double rel_tol = 1e-9;
  /// 0 means the OpenMP default.
  int workers = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Independent generator for sample `index` of stream `stream`.
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Reference implementation: evaluates f(0..n-1) in order.
template <class R, class F>
std::vector<R> map_samples_serial(std::size_t n, F&& f) {
  std::vector<R> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = f(i);
  }
  return out;
}

/// Same contract as map_samples_serial; results land at their index, so order is schedule-independent.
template <class R, class F>
std::vector<R> map_samples_parallel(std::size_t n, F&& f, int workers = 0) {
  std::vector<R> out(n);
  const long long count = static_cast<long long>(n);
#ifdef _OPENMP
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (long long i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
  }
#else
  (void)workers;
  for (long long i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
  }
#endif
  return out;
}

/// Gaussian direction dilated onto the unit gauge sphere.
Point unit_sphere_sample(const GeometrySpec& g, std::mt19937_64& rng);

/// Point with gauge log-uniform in [r_lo, r_hi] on a random unit-sphere ray.
Point shell_sample(const GeometrySpec& g, std::mt19937_64& rng, double r_lo, double r_hi);

/// Radical-inverse Halton coordinate of `index` in `base`.
double halton(std::uint64_t index, int base);

/// The first `count` primes, used as Halton bases.
std::vector<int> first_primes(int count);

/// Relative-plus-absolute tolerance for a one-sided check whose dominant term has size `scale`.
double one_sided_tolerance(const SamplePlan& plan, double scale);

} // namespace subriem
