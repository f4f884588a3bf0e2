#include "subriem/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace subriem {

std::string to_string(Trend t) {
  switch (t) {
  case Trend::Bounded:
    return "bounded";
  case Trend::Diverging:
    return "diverging";
  case Trend::Undetermined:
    return "undetermined";
  }
  return "";
}

Trend classify_trend(const std::vector<double>& values) {
  if (values.size() < 3) {
    return Trend::Undetermined;
  }
  const double a = values[values.size() - 3];
  const double b = values[values.size() - 2];
  const double c = values[values.size() - 1];
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    return Trend::Diverging;
  }
  if (a > 0.0 && b > 2.0 * a && c > 2.0 * b) {
    return Trend::Diverging;
  }
  const double hi = std::max({a, b, c});
  const double lo = std::min({a, b, c});
  const double size = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (size == 0.0 || (hi - lo) < 0.1 * size) {
    return Trend::Bounded;
  }
  return Trend::Undetermined;
}

namespace {

struct Probe {
  double value = -std::numeric_limits<double>::infinity();
  bool valid = false;
  Point p;
};

// Unit-cube coordinates z -> point with gauge in [r, 2r]: cube part projected to the unit sphere, last coordinate sets log-radius.
std::optional<Point> place(const GeometrySpec& g, const Eigen::VectorXd& z, double r) {
  const int n = g.ambient_dim();
  Point c(n);
  for (int i = 0; i < n; ++i) {
    c(i) = 2.0 * z(i) - 1.0;
  }
  if (!(gauge(g, c) > 1e-12)) {
    return std::nullopt;
  }
  return dilate(g, r * std::exp2(z(n)), project_to_unit_gauge(g, c));
}

} // namespace

GrowthProbeResult growth_probe(const GeometrySpec& g, const Expr& u, double c, double nu, const SamplePlan& plan,
                               const GrowthOptions& opts) {
  if (!(nu > 0.0 && nu < 1.0)) {
    throw std::invalid_argument("growth_probe: nu must lie in (0, 1)");
  }
  if (plan.per_rung < 1) {
    throw std::invalid_argument("growth_probe: per_rung must be positive");
  }
  GrowthProbeResult out;
  out.geometry = g.name();
  out.Q = g.homogeneous_dim();
  out.nu = nu;
  out.c = c;
  out.exponent_q2 = out.Q - 2.0;
  out.exponent_nu = (out.Q - 2.0) / (1.0 - nu);
  const int dims = g.ambient_dim() + 1;
  const std::vector<int> bases = first_primes(dims);
  const auto rungs = doubling_ladder(plan.r0, plan.rungs);

  for (const auto& rung : rungs) {
    const double r = rung.first;
    Eigen::VectorXd best_z = Eigen::VectorXd::Zero(dims);
    Probe best;
    bool overflow = false;
    auto run_round = [&](std::size_t count, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
      auto one = [&](std::size_t i) {
        Probe pr;
        Eigen::VectorXd z(dims);
        for (int k = 0; k < dims; ++k) {
          z(k) = lo(k) + (hi(k) - lo(k)) * halton(i, bases[static_cast<std::size_t>(k)]);
        }
        const auto p = place(g, z, r);
        if (!p) {
          return pr;
        }
        try {
          pr.value = eval(u, *p) - c;
          pr.valid = true;
          pr.p = *p;
        } catch (const EvalError&) {
        } catch (const std::domain_error&) {
        }
        return pr;
      };
      const auto res = map_samples_parallel<Probe>(count, one, plan.workers);
      for (std::size_t i = 0; i < count; ++i) {
        if (!res[i].valid) {
          continue;
        }
        if (!std::isfinite(res[i].value)) {
          overflow = true;
          continue;
        }
        if (!best.valid || res[i].value > best.value) {
          best = res[i];
          for (int k = 0; k < dims; ++k) {
            best_z(k) = lo(k) + (hi(k) - lo(k)) * halton(i, bases[static_cast<std::size_t>(k)]);
          }
        }
      }
    };
    run_round(static_cast<std::size_t>(plan.per_rung), Eigen::VectorXd::Zero(dims), Eigen::VectorXd::Ones(dims));
    double half = 0.5;
    const std::size_t refine_count = std::max<std::size_t>(16, static_cast<std::size_t>(plan.per_rung) / 4);
    for (int round = 0; round < opts.refine_rounds && best.valid; ++round) {
      half *= opts.shrink;
      const Eigen::VectorXd lo = (best_z.array() - half).max(0.0).matrix();
      const Eigen::VectorXd hi = (best_z.array() + half).min(1.0).matrix();
      run_round(refine_count, lo, hi);
    }
    GrowthRung gr;
    gr.r = r;
    gr.overflow = overflow;
    gr.sup = overflow ? std::numeric_limits<double>::infinity() : (best.valid ? best.value : 0.0);
    gr.scaled_q2 = gr.sup * std::pow(r, out.exponent_q2);
    gr.scaled_nu = gr.sup * std::pow(r, out.exponent_nu);
    gr.argmax = best.p;
    out.rungs.push_back(gr);
  }
  std::vector<double> q2;
  std::vector<double> qn;
  for (const auto& gr : out.rungs) {
    q2.push_back(gr.scaled_q2);
    qn.push_back(gr.scaled_nu);
  }
  out.trend_q2 = classify_trend(q2);
  out.trend_nu = classify_trend(qn);
  return out;
}

nlohmann::json to_json(const GrowthProbeResult& r) {
  nlohmann::json j;
  j["geometry"] = r.geometry;
  j["Q"] = r.Q;
  j["nu"] = r.nu;
  j["c"] = r.c;
  j["exponent_q2"] = r.exponent_q2;
  j["exponent_nu"] = r.exponent_nu;
  j["trend_q2"] = to_string(r.trend_q2);
  j["trend_nu"] = to_string(r.trend_nu);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& gr : r.rungs) {
    nlohmann::json row;
    row["r"] = gr.r;
    row["sup"] = gr.overflow ? nlohmann::json("overflow") : nlohmann::json(gr.sup);
    row["scaled_q2"] = gr.overflow ? nlohmann::json("overflow") : nlohmann::json(gr.scaled_q2);
    row["scaled_nu"] = gr.overflow ? nlohmann::json("overflow") : nlohmann::json(gr.scaled_nu);
    row["overflow"] = gr.overflow;
    row["argmax"] = std::vector<double>(gr.argmax.data(), gr.argmax.data() + gr.argmax.size());
    rows.push_back(row);
  }
  j["rungs"] = rows;
  return j;
}

} // namespace subriem
