#include "subriem/kernels.hpp"

#include <cmath>

namespace subriem {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const std::uint64_t s = splitmix64(splitmix64(seed ^ splitmix64(stream)) + index);
  return std::mt19937_64(s);
}

namespace {

// Box-Muller from raw 64-bit draws; std::normal_distribution is not portable across libraries.
double gaussian(std::mt19937_64& rng) {
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

} // namespace

Point unit_sphere_sample(const GeometrySpec& g, std::mt19937_64& rng) {
  Point z(g.ambient_dim());
  for (;;) {
    for (int i = 0; i < z.size(); ++i) {
      z(i) = gaussian(rng);
    }
    if (gauge(g, z) > 1e-8) {
      return project_to_unit_gauge(g, z);
    }
  }
}

Point shell_sample(const GeometrySpec& g, std::mt19937_64& rng, double r_lo, double r_hi) {
  const Point unit = unit_sphere_sample(g, rng);
  const double t = uniform01(rng);
  const double radius = r_lo * std::exp(t * std::log(r_hi / r_lo));
  return dilate(g, radius, unit);
}

double halton(std::uint64_t index, int base) {
  double f = 1.0;
  double r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
  }
  return r;
}

std::vector<int> first_primes(int count) {
  std::vector<int> out;
  for (int n = 2; static_cast<int>(out.size()) < count; ++n) {
    bool prime = true;
    for (int p : out) {
      if (p * p > n) {
        break;
      }
      if (n % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) {
      out.push_back(n);
    }
  }
  return out;
}

double one_sided_tolerance(const SamplePlan& plan, double scale) {
  return plan.abs_tol + plan.rel_tol * std::abs(scale);
}

} // namespace subriem
