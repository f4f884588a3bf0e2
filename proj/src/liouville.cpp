#include "subriem/liouville.hpp"

#include "ladder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace subriem {

std::string to_string(HamiltonianMode m) { return m == HamiltonianMode::Inf ? "inf" : "sup"; }
std::string to_string(DriftFrame f) { return f == DriftFrame::Horizontal ? "horizontal" : "euclidean"; }

std::string to_string(SecondOrderKind k) {
  switch (k) {
  case SecondOrderKind::MMinus:
    return "MMinus";
  case SecondOrderKind::MPlus:
    return "MPlus";
  case SecondOrderKind::P66Minus:
    return "P66Minus";
  case SecondOrderKind::P66Plus:
    return "P66Plus";
  case SecondOrderKind::NegTraceA:
    return "NegTraceA";
  }
  return "";
}

std::vector<std::pair<double, double>> doubling_ladder(double r0, int rungs) {
  if (!(r0 > 0.0) || rungs < 1) {
    throw std::invalid_argument("ladder needs r0 > 0 and at least one rung");
  }
  std::vector<std::pair<double, double>> out;
  for (int j = 0; j < rungs; ++j) {
    const double lo = std::ldexp(r0, j);
    out.emplace_back(lo, 2.0 * lo);
  }
  return out;
}

bool CoefficientFamily::c_is_zero() const {
  for (const auto& e : entries) {
    if (e.c.empty()) {
      continue;
    }
    if (!e.c.is_constant() || eval(e.c, Point::Zero(e.c.geometry().ambient_dim())) != 0.0) {
      return false;
    }
  }
  return true;
}

int CoefficientFamily::drift_dim(const GeometrySpec& g) const {
  return frame == DriftFrame::Horizontal ? g.rank() : g.ambient_dim();
}

void CoefficientFamily::validate(const GeometrySpec& g) const {
  const int dim = drift_dim(g);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& b = entries[i].b;
    if (!b.is_zero() && static_cast<int>(b.entries.size()) != dim) {
      throw DimensionError("coefficient entry " + std::to_string(i) + ": b has " + std::to_string(b.entries.size()) +
                           " components, expected " + std::to_string(dim));
    }
    if (!b.is_zero() && b.euclidean != (frame == DriftFrame::Euclidean)) {
      throw std::invalid_argument("coefficient entry " + std::to_string(i) + ": drift frame mismatch");
    }
  }
}

void OperatorSpec::validate(const GeometrySpec& g) const {
  switch (kind) {
  case SecondOrderKind::MMinus:
  case SecondOrderKind::MPlus:
    ell.validate();
    break;
  case SecondOrderKind::P66Minus:
  case SecondOrderKind::P66Plus:
    p66.validate();
    if (p66.m != g.rank()) {
      throw DimensionError("Pucci66 dimension does not match the horizontal rank");
    }
    break;
  case SecondOrderKind::NegTraceA:
    if (a.empty()) {
      throw std::invalid_argument("NegTraceA needs a coefficient expression a");
    }
    break;
  }
  coeffs.validate(g);
  if (coeffs.is_singleton() || kind == SecondOrderKind::NegTraceA) {
    return;
  }
  const bool minus = kind == SecondOrderKind::MMinus || kind == SecondOrderKind::P66Minus;
  if (minus && coeffs.mode != HamiltonianMode::Inf) {
    throw std::invalid_argument(to_string(kind) + " pairs with the inf Hamiltonian");
  }
  if (!minus && coeffs.mode != HamiltonianMode::Sup) {
    throw std::invalid_argument(to_string(kind) + " pairs with the sup Hamiltonian");
  }
}

double OperatorSpec::second_order(const Eigen::MatrixXd& M, const Point& p) const {
  switch (kind) {
  case SecondOrderKind::MMinus:
    return pucci_minus(ell, M);
  case SecondOrderKind::MPlus:
    return pucci_plus(ell, M);
  case SecondOrderKind::P66Minus:
    return pucci66_minus(p66, M);
  case SecondOrderKind::P66Plus:
    return pucci66_plus(p66, M);
  case SecondOrderKind::NegTraceA:
    return -eval(a, p) * M.trace();
  }
  return 0.0;
}

OperatorSpec mirrored(const OperatorSpec& op) {
  OperatorSpec out = op;
  switch (op.kind) {
  case SecondOrderKind::MMinus:
    out.kind = SecondOrderKind::MPlus;
    break;
  case SecondOrderKind::MPlus:
    out.kind = SecondOrderKind::MMinus;
    break;
  case SecondOrderKind::P66Minus:
    out.kind = SecondOrderKind::P66Plus;
    break;
  case SecondOrderKind::P66Plus:
    out.kind = SecondOrderKind::P66Minus;
    break;
  case SecondOrderKind::NegTraceA:
    break;
  }
  out.coeffs.mode = op.coeffs.mode == HamiltonianMode::Inf ? HamiltonianMode::Sup : HamiltonianMode::Inf;
  return out;
}

namespace {

struct HamiltonianValue {
  double value = 0.0;
  double scale = 0.0;
};

HamiltonianValue hamiltonian_scaled(const CoefficientFamily& coeffs, const Point& p, double r, const Eigen::VectorXd& grad) {
  HamiltonianValue out;
  if (coeffs.entries.empty()) {
    return out;
  }
  const bool inf = coeffs.mode == HamiltonianMode::Inf;
  out.value = inf ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  for (const auto& e : coeffs.entries) {
    const double c = e.c.empty() ? 0.0 : eval(e.c, p);
    const double bp = e.b.is_zero() ? 0.0 : e.b.eval(p, static_cast<int>(grad.size())).dot(grad);
    const double v = c * r - bp;
    out.value = inf ? std::min(out.value, v) : std::max(out.value, v);
    out.scale = std::max({out.scale, std::abs(c * r), std::abs(bp)});
  }
  return out;
}

double second_order_scale(const OperatorSpec& op, const Eigen::MatrixXd& M, const Point& p) {
  if (op.kind == SecondOrderKind::NegTraceA) {
    return std::abs(eval(op.a, p)) * M.diagonal().cwiseAbs().sum();
  }
  const Spectrum s = spectrum(M);
  double sum = 0.0;
  for (double e : s.eigenvalues) {
    sum += std::abs(e);
  }
  const double w = (op.kind == SecondOrderKind::MMinus || op.kind == SecondOrderKind::MPlus) ? op.ell.Lambda : 1.0;
  return w * sum;
}

} // namespace

double hamiltonian(const CoefficientFamily& coeffs, const Point& p, double r, const Eigen::VectorXd& grad) {
  return hamiltonian_scaled(coeffs, p, r, grad).value;
}

ResidualParts pde_residual_parts(const GeometrySpec& g, const OperatorSpec& op, const HorizontalJet& jet, const Point& p) {
  (void)g;
  ResidualParts out;
  out.second_order = op.second_order(jet.hhess, p);
  const Eigen::VectorXd& grad = op.coeffs.frame == DriftFrame::Euclidean ? jet.grad : jet.hgrad;
  const HamiltonianValue h = hamiltonian_scaled(op.coeffs, p, jet.value, grad);
  out.first_order = h.value;
  out.total = out.second_order + out.first_order;
  out.scale = std::max(second_order_scale(op, jet.hhess, p), h.scale);
  return out;
}

double pde_residual(const GeometrySpec& g, const OperatorSpec& op, const HorizontalJet& jet, const Point& p) {
  return pde_residual_parts(g, op, jet, p).total;
}

double pde_residual(const GeometrySpec& g, const OperatorSpec& op, const Expr& u, const Point& p) {
  return pde_residual(g, op, horizontal_jet(g, u, p), p);
}

std::string LyapunovCandidate::source() const {
  switch (shape) {
  case CandidateShape::LogRho:
    return "log(rho)";
  case CandidateShape::NegLogRho:
    return "-log(rho)";
  case CandidateShape::RhoSquared:
    return "rho^2";
  case CandidateShape::Custom:
    return custom;
  }
  return "";
}

std::string LyapunovCandidate::name() const {
  switch (shape) {
  case CandidateShape::LogRho:
    return "log_rho";
  case CandidateShape::NegLogRho:
    return "neg_log_rho";
  case CandidateShape::RhoSquared:
    return "rho_squared";
  case CandidateShape::Custom:
    return "custom";
  }
  return "";
}

Expr LyapunovCandidate::expr(const GeometrySpec& g) const { return parse(source(), g); }

namespace {

// Returns a reason string when a coefficient hypothesis fails at p.
std::string coefficient_violation(const OperatorSpec& op, const Point& p) {
  for (const auto& e : op.coeffs.entries) {
    if (!e.c.empty() && eval(e.c, p) < 0.0) {
      return "c^alpha < 0";
    }
  }
  if (op.kind == SecondOrderKind::NegTraceA && !(eval(op.a, p) > 0.0)) {
    return "a(x) <= 0";
  }
  return {};
}

} // namespace

CheckReport verify_lyapunov(const GeometrySpec& g, const OperatorSpec& op, const LyapunovCandidate& cand, double r0, double r1,
                            const SamplePlan& plan) {
  op.validate(g);
  const Expr w = cand.expr(g);
  const auto rungs = detail::split_annulus(r0, r1, plan.rungs);
  const bool positive = cand.positive();
  auto f = [&](const Point& p, double) {
    detail::SampleEval e;
    const std::string bad = coefficient_violation(op, p);
    if (!bad.empty()) {
      e.status = detail::SampleStatus::Invalid;
      e.invalid_reason = bad;
      return e;
    }
    const ResidualParts r = pde_residual_parts(g, op, horizontal_jet(g, w, p), p);
    if (positive) {
      e.lhs = 0.0;
      e.rhs = r.total;
    } else {
      e.lhs = r.total;
      e.rhs = 0.0;
    }
    detail::settle(e, plan, r.scale);
    return e;
  };
  const auto s = detail::run_samples(g, rungs, plan, detail::stream_of("verify_lyapunov"), f);
  CheckReport rep = detail::aggregate("verify_lyapunov", g, plan, s, false);
  rep.quantity_name = "residual";
  rep.extra["candidate"] = cand.name();
  rep.extra["candidate_expr"] = cand.source();
  rep.extra["annulus"] = {r0, r1};
  rep.extra["operator"] = to_string(op.kind);
  rep.extra["mode"] = to_string(op.coeffs.mode);
  rep.extra["direction"] = positive ? "supersolution" : "subsolution";
  return rep;
}

namespace {

struct CompareSample {
  bool excluded = false;
  double ru = 0.0;
  double rv = 0.0;
  double diff = 0.0;
  double ratio = 0.0;
  bool ratio_valid = false;
  double scale_u = 0.0;
  double scale_v = 0.0;
};

} // namespace

CheckReport comparison_verdict(const GeometrySpec& g, const OperatorSpec& op, const Expr& u, const Expr& v,
                               const LyapunovCandidate& cand, const SamplePlan& plan) {
  op.validate(g);
  if (!op.coeffs.c_is_zero()) {
    throw std::invalid_argument("comparison principle needs c^alpha = 0");
  }
  const Expr w = cand.expr(g);
  const auto rungs = doubling_ladder(plan.r0, plan.rungs);
  const std::size_t per = static_cast<std::size_t>(std::max(0, plan.per_rung));
  const std::size_t n = per * rungs.size();
  const SingularSet sing{plan.eps_sing};
  const std::uint64_t stream = detail::stream_of("compare");
  auto one = [&](std::size_t i) {
    CompareSample c;
    std::mt19937_64 rng = sample_rng(plan.seed, stream, i);
    const auto& [lo, hi] = rungs[i / per];
    const Point p = shell_sample(g, rng, lo, hi);
    if (near_singular(g, p, sing)) {
      c.excluded = true;
      return c;
    }
    try {
      const ResidualParts pu = pde_residual_parts(g, op, horizontal_jet(g, u, p), p);
      const ResidualParts pv = pde_residual_parts(g, op, horizontal_jet(g, v, p), p);
      c.ru = pu.total;
      c.rv = pv.total;
      c.scale_u = pu.scale;
      c.scale_v = pv.scale;
      c.diff = eval(u, p) - eval(v, p);
      const double wv = eval(w, p);
      if (wv * cand.sign > 0.0) {
        c.ratio = c.diff / std::abs(wv);
        c.ratio_valid = true;
      }
    } catch (const EvalError&) {
      c.excluded = true;
    } catch (const std::domain_error&) {
      c.excluded = true;
    }
    return c;
  };
  const auto res = map_samples_parallel<CompareSample>(n, one, plan.workers);

  CheckReport rep;
  rep.id = "compare";
  rep.geometry = g.name();
  rep.seed = plan.seed;
  rep.per_rung = plan.per_rung;
  rep.r0 = plan.r0;
  rep.rungs = plan.rungs;
  rep.eps_sing = plan.eps_sing;
  rep.ladder.resize(rungs.size());
  std::vector<double> ratio_max(rungs.size(), -std::numeric_limits<double>::infinity());
  std::vector<bool> ratio_seen(rungs.size(), false);
  int sub_fail = 0;
  int super_fail = 0;
  double diff_min = std::numeric_limits<double>::infinity();
  double diff_max = -std::numeric_limits<double>::infinity();
  double margin_min = std::numeric_limits<double>::infinity();
  nlohmann::json premise_witnesses = nlohmann::json::array();
  for (std::size_t j = 0; j < rungs.size(); ++j) {
    rep.ladder[j].r_lo = rungs[j].first;
    rep.ladder[j].r_hi = rungs[j].second;
    rep.ladder[j].min_margin = std::numeric_limits<double>::infinity();
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = res[i];
    auto& rs = rep.ladder[i / per];
    if (c.excluded) {
      ++rep.samples_excluded;
      ++rs.excluded;
      continue;
    }
    ++rep.samples_evaluated;
    ++rs.samples;
    const double mu = -c.ru;
    const double mv = c.rv;
    const bool fu = mu < -one_sided_tolerance(plan, c.scale_u);
    const bool fv = mv < -one_sided_tolerance(plan, c.scale_v);
    const double m = std::min(mu, mv);
    rs.min_margin = std::min(rs.min_margin, m);
    margin_min = std::min(margin_min, m);
    if (fu || fv) {
      ++rs.failures;
      if (premise_witnesses.size() < CheckReport::kMaxWitnesses) {
        premise_witnesses.push_back({{"index", i}, {"premise", fu ? "u_subsolution" : "v_supersolution"}, {"margin", fu ? mu : mv}});
      }
    }
    sub_fail += fu ? 1 : 0;
    super_fail += fv ? 1 : 0;
    diff_min = std::min(diff_min, c.diff);
    diff_max = std::max(diff_max, c.diff);
    if (c.ratio_valid) {
      ratio_max[i / per] = std::max(ratio_max[i / per], c.ratio);
      ratio_seen[i / per] = true;
    }
  }
  for (auto& rs : rep.ladder) {
    if (rs.samples == 0) {
      rs.min_margin = 0.0;
    }
  }
  rep.min_margin = std::isfinite(margin_min) ? margin_min : 0.0;
  rep.excluded_fraction = n > 0 ? static_cast<double>(rep.samples_excluded) / static_cast<double>(n) : 0.0;

  std::vector<double> maxima;
  for (std::size_t j = 0; j < rungs.size(); ++j) {
    if (ratio_seen[j]) {
      maxima.push_back(ratio_max[j]);
    }
  }
  bool growth_ok = false;
  if (!maxima.empty()) {
    const double tol = plan.abs_tol + plan.rel_tol;
    if (maxima.back() <= tol) {
      growth_ok = true;
    } else {
      bool nonincreasing = true;
      for (std::size_t j = 1; j < maxima.size(); ++j) {
        nonincreasing = nonincreasing && maxima[j] <= maxima[j - 1] + tol;
      }
      growth_ok = nonincreasing && maxima.back() <= 0.5 * maxima.front();
    }
  }

  const CheckReport lyap = verify_lyapunov(g, op, cand, rungs.front().first, rungs.back().second, plan);
  const bool sub_ok = sub_fail == 0 && rep.samples_evaluated > 0;
  const bool super_ok = super_fail == 0 && rep.samples_evaluated > 0;
  const bool lyap_ok = lyap.verdict == Verdict::Holds;

  nlohmann::json premises;
  premises["u_subsolution"] = sub_ok;
  premises["v_supersolution"] = super_ok;
  premises["growth"] = growth_ok;
  premises["lyapunov"] = lyap_ok;
  rep.extra["premises"] = premises;
  rep.extra["premise_witnesses"] = premise_witnesses;
  rep.extra["subsolution_failures"] = sub_fail;
  rep.extra["supersolution_failures"] = super_fail;
  rep.extra["ratio_rung_max"] = maxima;
  rep.extra["difference_min"] = std::isfinite(diff_min) ? diff_min : 0.0;
  rep.extra["difference_max"] = std::isfinite(diff_max) ? diff_max : 0.0;
  rep.extra["candidate"] = cand.name();
  rep.extra["lyapunov"] = to_json(lyap);
  rep.quantity_name = "premise_margin";
  const bool ok = sub_ok && super_ok && growth_ok && lyap_ok && rep.excluded_fraction <= plan.max_excluded_fraction;
  rep.verdict = ok ? Verdict::Holds : Verdict::Inconclusive;
  if (ok) {
    rep.notes.push_back("premises hold: u and v agree up to an additive constant");
  } else {
    rep.notes.push_back("a premise failed; no conclusion");
  }
  return rep;
}

std::vector<ResidualRow> residual_table(const GeometrySpec& g, const OperatorSpec& op, const Expr& u, const SamplePlan& plan) {
  op.validate(g);
  const auto rungs = doubling_ladder(plan.r0, plan.rungs);
  auto f = [&](const Point& p, double) {
    detail::SampleEval e;
    e.rhs = pde_residual(g, op, u, p);
    e.margin = e.rhs;
    return e;
  };
  const auto s = detail::run_samples(g, rungs, plan, detail::stream_of("residual"), f);
  std::vector<ResidualRow> rows;
  for (std::size_t i = 0; i < s.evals.size(); ++i) {
    if (s.evals[i].status != detail::SampleStatus::Ok) {
      continue;
    }
    rows.push_back({s.points[i], s.rho[i], s.evals[i].rhs});
  }
  return rows;
}

} // namespace subriem
