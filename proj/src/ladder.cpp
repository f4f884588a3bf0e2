#include "ladder.hpp"

#include "subriem/expr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace subriem::detail {

std::uint64_t stream_of(const std::string& tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : tag) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::pair<double, double>> split_annulus(double r0, double r1, int parts) {
  if (!(r0 > 0.0) || !(r1 > r0)) {
    throw std::invalid_argument("annulus needs 0 < r0 < r1");
  }
  parts = std::max(1, parts);
  std::vector<std::pair<double, double>> out;
  const double step = std::log(r1 / r0) / parts;
  for (int j = 0; j < parts; ++j) {
    const double lo = j == 0 ? r0 : r0 * std::exp(step * j);
    const double hi = j == parts - 1 ? r1 : r0 * std::exp(step * (j + 1));
    out.emplace_back(lo, hi);
  }
  return out;
}

namespace {

struct Drawn {
  Point p;
  double rho = 0.0;
  SampleEval e;
};

} // namespace

LadderSamples run_samples(const GeometrySpec& g, const std::vector<std::pair<double, double>>& rungs, const SamplePlan& plan,
                          std::uint64_t stream, const PointCheck& f) {
  if (plan.per_rung < 0) {
    throw std::invalid_argument("per_rung must be nonnegative");
  }
  const std::size_t per = static_cast<std::size_t>(plan.per_rung);
  const std::size_t n = per * rungs.size();
  const SingularSet sing{plan.eps_sing};
  auto draw = [&](std::size_t i) {
    Drawn d;
    const auto& [lo, hi] = rungs[i / per];
    std::mt19937_64 rng = sample_rng(plan.seed, stream, i);
    d.p = shell_sample(g, rng, lo, hi);
    d.rho = gauge(g, d.p);
    if (near_singular(g, d.p, sing)) {
      d.e.status = SampleStatus::Excluded;
      return d;
    }
    try {
      d.e = f(d.p, d.rho);
    } catch (const EvalError&) {
      d.e = SampleEval{};
      d.e.status = SampleStatus::Excluded;
    } catch (const std::domain_error&) {
      d.e = SampleEval{};
      d.e.status = SampleStatus::Excluded;
    }
    return d;
  };
  auto drawn = map_samples_parallel<Drawn>(n, draw, plan.workers);
  LadderSamples s;
  s.rungs = rungs;
  s.points.reserve(n);
  s.rho.reserve(n);
  s.rung.reserve(n);
  s.evals.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.points.push_back(std::move(drawn[i].p));
    s.rho.push_back(drawn[i].rho);
    s.rung.push_back(static_cast<int>(i / per));
    s.evals.push_back(std::move(drawn[i].e));
  }
  return s;
}

void settle(SampleEval& e, const SamplePlan& plan, double scale) {
  e.margin = e.rhs - e.lhs;
  e.failed = !(e.margin >= -one_sided_tolerance(plan, scale));
}

namespace {

Witness make_witness(const LadderSamples& s, std::size_t i) {
  Witness w;
  w.index = i;
  w.rung = s.rung[i];
  w.point = s.points[i];
  w.rho = s.rho[i];
  w.lhs = s.evals[i].lhs;
  w.rhs = s.evals[i].rhs;
  w.margin = s.evals[i].margin;
  w.quantity = s.evals[i].quantity;
  return w;
}

} // namespace

CheckReport aggregate(const std::string& id, const GeometrySpec& g, const SamplePlan& plan, const LadderSamples& s,
                      bool onset_rule) {
  CheckReport rep;
  rep.id = id;
  rep.geometry = g.name();
  rep.seed = plan.seed;
  rep.per_rung = plan.per_rung;
  rep.rungs = static_cast<int>(s.rungs.size());
  rep.r0 = s.rungs.empty() ? plan.r0 : s.rungs.front().first;
  rep.eps_sing = plan.eps_sing;

  const std::size_t nr = s.rungs.size();
  rep.ladder.resize(nr);
  for (std::size_t j = 0; j < nr; ++j) {
    rep.ladder[j].r_lo = s.rungs[j].first;
    rep.ladder[j].r_hi = s.rungs[j].second;
    rep.ladder[j].min_margin = std::numeric_limits<double>::infinity();
  }
  int invalid = 0;
  std::string invalid_reason;
  for (std::size_t i = 0; i < s.evals.size(); ++i) {
    const auto& e = s.evals[i];
    auto& rs = rep.ladder[static_cast<std::size_t>(s.rung[i])];
    if (e.status == SampleStatus::Invalid) {
      ++invalid;
      if (invalid_reason.empty()) {
        invalid_reason = e.invalid_reason;
      }
    }
    if (e.status != SampleStatus::Ok) {
      ++rs.excluded;
      ++rep.samples_excluded;
      continue;
    }
    ++rs.samples;
    ++rep.samples_evaluated;
    rs.min_margin = std::min(rs.min_margin, e.margin);
    if (e.failed) {
      ++rs.failures;
    }
  }
  for (auto& rs : rep.ladder) {
    if (rs.samples == 0) {
      rs.min_margin = 0.0;
    }
  }
  const std::size_t total = s.evals.size();
  rep.excluded_fraction = total > 0 ? static_cast<double>(rep.samples_excluded) / static_cast<double>(total) : 0.0;

  std::size_t first_counted = 0;
  bool violated = false;
  if (onset_rule) {
    if (nr > 0 && rep.ladder.back().failures > 0) {
      violated = true;
    } else {
      std::size_t onset = nr;
      while (onset > 0 && rep.ladder[onset - 1].failures == 0) {
        --onset;
      }
      first_counted = onset;
      for (std::size_t j = 0; j < onset; ++j) {
        rep.pre_onset_failures += rep.ladder[j].failures;
      }
      if (onset < nr) {
        rep.onset_radius = rep.ladder[onset].r_lo;
      }
    }
  } else {
    for (const auto& rs : rep.ladder) {
      violated = violated || rs.failures > 0;
    }
  }

  rep.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.evals.size(); ++i) {
    const auto& e = s.evals[i];
    if (e.status != SampleStatus::Ok || static_cast<std::size_t>(s.rung[i]) < first_counted) {
      continue;
    }
    rep.min_margin = std::min(rep.min_margin, e.margin);
    if (violated && e.failed) {
      ++rep.violation_count;
      if (rep.witnesses.size() < CheckReport::kMaxWitnesses) {
        rep.witnesses.push_back(make_witness(s, i));
      }
    }
  }
  if (!std::isfinite(rep.min_margin)) {
    rep.min_margin = 0.0;
  }

  if (invalid > 0) {
    rep.notes.push_back("invalid samples: " + std::to_string(invalid) + " (" + invalid_reason + ")");
  }
  if (violated) {
    rep.verdict = Verdict::Violated;
  } else if (invalid > 0 || rep.samples_evaluated == 0 || rep.excluded_fraction > plan.max_excluded_fraction) {
    rep.verdict = Verdict::Inconclusive;
    rep.onset_radius.reset();
  } else {
    rep.verdict = Verdict::Holds;
  }
  return rep;
}

} // namespace subriem::detail
