#include "subriem/liouville.hpp"

#include "ladder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace subriem {

const std::vector<std::string>& condition_ids() {
  static const std::vector<std::string> ids = {"condgen",       "condH",         "condHimp",          "liohad_gate",
                                               "OUtype",        "c_a_sign_order", "c_a_order_weak",    "condcor1free",
                                               "condcor1freepucci", "Grucond",   "condcor1grushin",   "condcor1"};
  return ids;
}

namespace {

struct Coef {
  Eigen::VectorXd b;
  double c = 0.0;
};

std::vector<Coef> coefficients_at(const OperatorSpec& op, const GeometrySpec& g, const Point& p) {
  const int dim = op.coeffs.drift_dim(g);
  std::vector<Coef> out;
  for (const auto& e : op.coeffs.entries) {
    Coef k;
    k.b = e.b.is_zero() ? Eigen::VectorXd::Zero(dim) : e.b.eval(p, dim);
    k.c = e.c.empty() ? 0.0 : eval(e.c, p);
    out.push_back(std::move(k));
  }
  if (out.empty()) {
    out.push_back({Eigen::VectorXd::Zero(dim), 0.0});
  }
  return out;
}

struct SupTerm {
  double value = -std::numeric_limits<double>::infinity();
  double scale = 0.0;
};

// sup over alpha of b . X - c Y
SupTerm sup_term(const std::vector<Coef>& cs, const Eigen::VectorXd& X, double Y) {
  SupTerm s;
  for (const auto& k : cs) {
    const double bx = k.b.dot(X);
    const double cy = k.c * Y;
    s.value = std::max(s.value, bx - cy);
    s.scale = std::max({s.scale, std::abs(bx), std::abs(cy)});
  }
  return s;
}

bool is_minus(SecondOrderKind k) { return k == SecondOrderKind::MMinus || k == SecondOrderKind::P66Minus; }

void require(bool ok, const std::string& id, const std::string& what) {
  if (!ok) {
    throw std::invalid_argument(id + ": " + what);
  }
}

void require_kind(const std::string& id, const OperatorSpec& op, std::initializer_list<SecondOrderKind> kinds) {
  for (auto k : kinds) {
    if (op.kind == k) {
      return;
    }
  }
  throw std::invalid_argument(id + ": operator " + to_string(op.kind) + " is not supported by this condition");
}

void require_frame(const std::string& id, const OperatorSpec& op, DriftFrame f) {
  require(op.coeffs.frame == f, id, "needs a " + to_string(f) + " drift");
}

bool is_heisenberg_like(const GeometrySpec& g) {
  return g.kind == GeometryKind::Heisenberg || g.kind == GeometryKind::HType7 ||
         (g.kind == GeometryKind::FreeStep2 && g.r == 2);
}

void check_compat(const std::string& id, const GeometrySpec& g, const OperatorSpec& op) {
  using K = SecondOrderKind;
  if (id == "condgen") {
    require(is_heisenberg_like(g), id, "needs a geometry whose gauge is a sub-Laplacian gauge");
    require_kind(id, op, {K::NegTraceA, K::MPlus});
    if (op.kind == K::MPlus) {
      require(op.coeffs.is_singleton() || op.coeffs.mode == HamiltonianMode::Inf, id, "MPlus needs the inf Hamiltonian");
    }
    require_frame(id, op, DriftFrame::Horizontal);
  } else if (id == "condH") {
    require(g.kind == GeometryKind::HType7, id, "needs HType7");
    require_kind(id, op, {K::MMinus, K::MPlus});
    require_frame(id, op, DriftFrame::Horizontal);
  } else if (id == "condHimp") {
    require(g.kind == GeometryKind::HType7 || g.kind == GeometryKind::Heisenberg, id, "needs HType7 or Heisenberg");
    require_kind(id, op, {K::MPlus});
    require(op.coeffs.is_singleton(), id, "needs a single (b, c) pair");
    require_frame(id, op, DriftFrame::Horizontal);
  } else if (id == "OUtype" || id == "c_a_sign_order" || id == "c_a_order_weak") {
    require(g.kind == GeometryKind::HType7, id, "needs HType7");
    require_frame(id, op, DriftFrame::Euclidean);
    require_kind(id, op, {K::MMinus, K::MPlus});
  } else if (id == "condcor1free") {
    require(g.kind == GeometryKind::FreeStep2, id, "needs FreeStep2");
    require_kind(id, op, {K::MMinus, K::MPlus});
    require_frame(id, op, DriftFrame::Horizontal);
  } else if (id == "condcor1freepucci") {
    require(g.kind == GeometryKind::FreeStep2, id, "needs FreeStep2");
    require_kind(id, op, {K::P66Minus, K::P66Plus});
    require_frame(id, op, DriftFrame::Horizontal);
  } else if (id == "Grucond") {
    require(g.kind == GeometryKind::Grushin, id, "needs Grushin");
    require_kind(id, op, {K::NegTraceA});
    require_frame(id, op, DriftFrame::Horizontal);
  } else if (id == "condcor1grushin") {
    require(g.is_grushin_plane(), id, "needs the Grushin plane");
    require_kind(id, op, {K::MMinus, K::MPlus});
    require_frame(id, op, DriftFrame::Horizontal);
  } else if (id == "condcor1") {
    require(g.kind == GeometryKind::HeisenbergGreiner, id, "needs HeisenbergGreiner");
    require_kind(id, op, {K::NegTraceA});
    require_frame(id, op, DriftFrame::Horizontal);
  } else {
    throw std::invalid_argument("unknown condition id: " + id);
  }
}

std::vector<double> as_std(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// One sample of a ladder condition of the form sup_alpha{b.X - c Y} <= rhs.
detail::SampleEval sup_condition(const SupTerm& s, double factor, double rhs, double rhs_scale, const SamplePlan& plan) {
  detail::SampleEval e;
  e.lhs = factor * s.value;
  e.rhs = rhs;
  detail::settle(e, plan, std::max(factor * s.scale, rhs_scale));
  return e;
}

detail::SampleEval eval_condition(const std::string& id, const GeometrySpec& g, const OperatorSpec& op,
                                  const ConditionOptions& opts, const Point& p, double rho, const SamplePlan& plan) {
  const auto cs = coefficients_at(op, g, p);
  for (const auto& k : cs) {
    if (k.c < 0.0) {
      detail::SampleEval e;
      e.status = detail::SampleStatus::Invalid;
      e.invalid_reason = "c^alpha < 0";
      return e;
    }
  }
  const double Q = g.homogeneous_dim();
  const double lr = std::log(rho);
  const double lambda = op.ell.lambda;
  const double Lambda = op.ell.Lambda;
  auto trace_weight = [&]() {
    if (op.kind == SecondOrderKind::NegTraceA) {
      const double a = eval(op.a, p);
      if (!(a > 0.0)) {
        throw std::domain_error("a(x) <= 0");
      }
      return a;
    }
    return lambda;
  };

  if (id == "condgen") {
    const Eigen::VectorXd dr = gauge_hgrad_closed(g, p);
    const double lam = trace_weight();
    const double rhs = -lam * (Q - 2.0) * dr.squaredNorm();
    auto e = sup_condition(sup_term(cs, rho * dr, rho * rho * lr), 1.0, rhs, std::abs(rhs), plan);
    e.quantity = as_std(gauge_quantity(g, p));
    return e;
  }
  if (id == "condH" || id == "condHimp") {
    const double xh2 = p.head(g.rank()).squaredNorm();
    const Eigen::VectorXd mu = gauge_quantity(g, p);
    const double rhs = id == "condH" ? lambda - Lambda * (Q - 1.0) : Lambda - lambda * (Q - 1.0);
    auto e = sup_condition(sup_term(cs, mu / xh2, std::pow(rho, 4) * lr / xh2), 1.0, rhs,
                           std::max(lambda, Lambda) * Q, plan);
    e.quantity = as_std(mu);
    return e;
  }
  if (id == "condcor1free") {
    const Eigen::VectorXd dr = gauge_hgrad_closed(g, p);
    const double xh2 = p.head(g.rank()).squaredNorm();
    const double a = 4.0 * lambda * dr.squaredNorm() / (rho * rho);
    const double b = 3.0 * g.r * Lambda * xh2 / std::pow(rho, 4);
    auto e = sup_condition(sup_term(cs, dr / rho, lr), 1.0, a - b, std::max(a, b), plan);
    e.quantity = as_std(gauge_quantity(g, p));
    return e;
  }
  if (id == "condcor1freepucci") {
    const Eigen::VectorXd mu = gauge_quantity(g, p);
    const double xh2 = p.head(g.rank()).squaredNorm();
    const double a = 4.0 * op.p66.lam * rho * rho * gauge_hgrad_norm_sq_closed(g, p);
    const double b = 3.0 * xh2;
    auto e = sup_condition(sup_term(cs, mu, std::pow(rho, 4) * lr), 1.0, a - b, std::max(a, b), plan);
    e.quantity = as_std(mu);
    return e;
  }
  if (id == "Grucond") {
    const double gm = g.gamma;
    const double nx2 = p.head(g.n).squaredNorm();
    const double w = std::pow(nx2, gm);
    const Eigen::VectorXd q = std::pow(rho, 2.0 * gm + 1.0) * gauge_hgrad_closed(g, p) / w;
    const double lam = trace_weight();
    const double rhs = -lam * (Q - 2.0);
    auto e = sup_condition(sup_term(cs, q, std::pow(rho, 2.0 * gm + 2.0) * lr / w), 1.0, rhs, std::abs(rhs), plan);
    e.quantity = as_std(q);
    return e;
  }
  if (id == "condcor1grushin") {
    const double x = p(0);
    const double y = p(1);
    const Eigen::VectorXd eta = gauge_quantity(g, p);
    const double S = std::sqrt(9.0 * x * x * x * x + 4.0 * y * y);
    const double rhs = (-Lambda - lambda) * x * x + (lambda - Lambda) * S;
    auto e = sup_condition(sup_term(cs, eta, std::pow(rho, 4) * lr), 2.0, rhs, (Lambda + lambda) * (x * x + S), plan);
    e.quantity = as_std(eta);
    return e;
  }
  if (id == "condcor1") {
    const double r2 = p.head(2 * g.d).squaredNorm();
    const double den = std::pow(r2, 2.0 * g.delta - 1.0);
    const Eigen::VectorXd eta = gauge_quantity(g, p);
    const double lam = trace_weight();
    const double rhs = -lam * (Q - 2.0);
    auto e = sup_condition(sup_term(cs, eta / den, std::pow(rho, 4.0 * g.delta) * lr / den), 1.0, rhs, std::abs(rhs), plan);
    e.quantity = as_std(eta);
    return e;
  }
  if (id == "OUtype") {
    const Eigen::VectorXd dr = gauge_jet(g, p).grad();
    const int n = g.ambient_dim();
    std::vector<double> gamma = opts.gamma.empty() ? std::vector<double>(static_cast<std::size_t>(n), 1.0) : opts.gamma;
    if (static_cast<int>(gamma.size()) != n) {
      throw DimensionError("OUtype: gamma needs one weight per coordinate");
    }
    double target = 0.0;
    double target_scale = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = gamma[static_cast<std::size_t>(i)] * p(i) * dr(i);
      target -= t;
      target_scale += std::abs(t);
    }
    double sb = -std::numeric_limits<double>::infinity();
    double sb_scale = 0.0;
    for (const auto& k : cs) {
      const double v = k.b.dot(dr);
      sb = std::max(sb, v);
      sb_scale = std::max(sb_scale, k.b.cwiseAbs().dot(dr.cwiseAbs()));
    }
    const double r3 = rho * rho * rho;
    detail::SampleEval e;
    e.lhs = sb;
    e.rhs = target;
    const double m1 = r3 * (target - sb);
    const bool f1 = m1 < -one_sided_tolerance(plan, r3 * std::max(target_scale, sb_scale));
    // Largeness requirement from the supersolution estimate: |x_H|^2 (g0 |x_H|^2 - C1) + g0/2 |x_V|^2 >= 0.
    const double g0 = *std::min_element(gamma.begin(), gamma.end());
    require(g0 > 0.0, id, "gamma weights must be positive");
    const double C1 = Lambda * (Q - 1.0) - lambda;
    const double xh2 = p.head(g.rank()).squaredNorm();
    const double xv2 = p.tail(n - g.rank()).squaredNorm();
    const double big = xh2 * (g0 * xh2 - C1) + 0.5 * g0 * xv2;
    const double big_scale = g0 * xh2 * xh2 + C1 * xh2 + 0.5 * g0 * xv2;
    const bool f2 = big < -one_sided_tolerance(plan, big_scale);
    e.margin = std::min(m1, big / std::pow(rho, 4));
    e.failed = f1 || f2;
    e.quantity = {m1, big};
    return e;
  }
  if (id == "c_a_sign_order" || id == "c_a_order_weak") {
    const Eigen::VectorXd dr = gauge_jet(g, p).grad();
    double cmin = std::numeric_limits<double>::infinity();
    double sb = -std::numeric_limits<double>::infinity();
    double bmax = 0.0;
    for (const auto& k : cs) {
      cmin = std::min(cmin, k.c);
      sb = std::max(sb, k.b.dot(dr));
      bmax = std::max(bmax, k.b.norm());
    }
    detail::SampleEval e;
    if (id == "c_a_sign_order") {
      e.lhs = sb;
      e.rhs = cmin * lr;
      e.aux = bmax / rho;
    } else {
      e.lhs = 0.0;
      e.rhs = cmin;
      e.aux = lr > 0.0 ? bmax / (rho * lr) : std::numeric_limits<double>::infinity();
    }
    // Largeness requirement from the supersolution estimate: inf c log rho - sup b.Drho/rho - C1 |x_H|^2/rho^4 >= 0.
    const double C1 = Lambda * (Q - 1.0) - lambda;
    const double xh2 = p.head(g.rank()).squaredNorm();
    const double big = cmin * lr - sb / rho - C1 * xh2 / std::pow(rho, 4);
    const double big_scale = std::abs(cmin * lr) + std::abs(sb / rho) + C1 * xh2 / std::pow(rho, 4);
    e.quantity = {cmin * lr, sb, bmax, big, big_scale};
    return e;
  }
  throw std::invalid_argument("unknown condition id: " + id);
}

bool decays(const std::vector<double>& maxima, double tol) {
  if (maxima.empty()) {
    return false;
  }
  if (maxima.back() <= tol) {
    return true;
  }
  for (std::size_t j = 1; j < maxima.size(); ++j) {
    if (maxima[j] > maxima[j - 1] + tol) {
      return false;
    }
  }
  return maxima.back() <= 0.5 * maxima.front();
}

// Settles the per-sample flags of the c_a family once the rung-level order test is known.
nlohmann::json settle_c_a(const std::string& id, detail::LadderSamples& s, const SamplePlan& plan) {
  std::vector<double> maxima(s.rungs.size(), 0.0);
  std::vector<bool> seen(s.rungs.size(), false);
  for (std::size_t i = 0; i < s.evals.size(); ++i) {
    if (s.evals[i].status != detail::SampleStatus::Ok) {
      continue;
    }
    const auto j = static_cast<std::size_t>(s.rung[i]);
    maxima[j] = seen[j] ? std::max(maxima[j], s.evals[i].aux) : s.evals[i].aux;
    seen[j] = true;
  }
  std::vector<double> present;
  for (std::size_t j = 0; j < maxima.size(); ++j) {
    if (seen[j]) {
      present.push_back(maxima[j]);
    }
  }
  const bool order_ok = decays(present, plan.abs_tol);
  for (auto& e : s.evals) {
    if (e.status != detail::SampleStatus::Ok) {
      continue;
    }
    const double big = e.quantity[3];
    const bool big_ok = big >= -one_sided_tolerance(plan, e.quantity[4]);
    if (id == "c_a_sign_order") {
      const double cpart = e.rhs; // inf c log rho
      const bool c_ok = cpart > plan.abs_tol;
      const bool sign_ok = e.lhs <= one_sided_tolerance(plan, std::abs(e.lhs));
      e.margin = std::min(order_ok ? cpart : std::min(cpart, -e.lhs), big);
      e.failed = !c_ok || !(sign_ok || order_ok) || !big_ok;
    } else {
      const bool c_ok = e.rhs > plan.abs_tol;
      e.margin = std::min(e.rhs, big);
      e.failed = !c_ok || !order_ok || !big_ok;
    }
  }
  nlohmann::json j;
  j["order_rung_max"] = present;
  j["order_holds"] = order_ok;
  return j;
}

} // namespace

LyapunovCandidate paired_candidate(const std::string& id, const OperatorSpec& op) {
  if (id == "condHimp" || (id == "condgen" && op.kind == SecondOrderKind::MPlus)) {
    return LyapunovCandidate::log_rho();
  }
  if (op.kind == SecondOrderKind::NegTraceA) {
    return op.coeffs.mode == HamiltonianMode::Inf ? LyapunovCandidate::log_rho() : LyapunovCandidate::neg_log_rho();
  }
  return is_minus(op.kind) ? LyapunovCandidate::log_rho() : LyapunovCandidate::neg_log_rho();
}

CheckReport liohad_gate(const Ellipticity& ell, double Q) {
  ell.validate();
  CheckReport rep;
  rep.id = "liohad_gate";
  const double ratio = ell.Lambda / ell.lambda;
  rep.min_margin = ratio + 1.0 - Q;
  rep.verdict = Q - 1.0 <= ratio ? Verdict::Holds : Verdict::Violated;
  rep.extra["Q"] = Q;
  rep.extra["lambda"] = ell.lambda;
  rep.extra["Lambda"] = ell.Lambda;
  rep.extra["ratio"] = ratio;
  if (rep.verdict == Verdict::Violated) {
    rep.violation_count = 1;
    Witness w;
    w.lhs = Q - 1.0;
    w.rhs = ratio;
    w.margin = rep.min_margin;
    rep.witnesses.push_back(w);
  }
  return rep;
}

CheckReport check_condition(const std::string& id, const GeometrySpec& g, const OperatorSpec& op, const SamplePlan& plan,
                            const ConditionOptions& opts) {
  if (id == "liohad_gate") {
    CheckReport rep = liohad_gate(op.ell, g.homogeneous_dim());
    rep.geometry = g.name();
    return rep;
  }
  op.validate(g);
  check_compat(id, g, op);
  const auto rungs = doubling_ladder(plan.r0, plan.rungs);
  auto f = [&](const Point& p, double rho) { return eval_condition(id, g, op, opts, p, rho, plan); };
  auto s = detail::run_samples(g, rungs, plan, detail::stream_of("check:" + id), f);
  nlohmann::json order;
  if (id == "c_a_sign_order" || id == "c_a_order_weak") {
    order = settle_c_a(id, s, plan);
  }
  CheckReport rep = detail::aggregate(id, g, plan, s, true);
  if (id == "OUtype") {
    rep.quantity_name = "remainder_and_largeness";
  } else if (id == "c_a_sign_order" || id == "c_a_order_weak") {
    rep.quantity_name = "c_log_rho_sign_bmax";
    rep.extra["order"] = order;
  } else if (id == "Grucond") {
    rep.quantity_name = "q";
  } else {
    rep.quantity_name = gauge_quantity_name(g);
  }
  rep.extra["operator"] = to_string(op.kind);
  rep.extra["paired_candidate"] = paired_candidate(id, op).name();
  rep.extra["Q"] = g.homogeneous_dim();
  return rep;
}

} // namespace subriem
