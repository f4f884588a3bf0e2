#include "subriem/liouville.hpp"

#include "ladder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace subriem {

const std::vector<std::string>& counterexample_ids() {
  static const std::vector<std::string> ids = {"nonex_u1", "grushin_ubar", "hg_subsolution", "optimality_drift"};
  return ids;
}

namespace {

constexpr double kCertTol = 1e-12;

HorizontalJet radial_jet(const GeometrySpec& g, const RadialProfile& prof, const Point& p) {
  return horizontal_jet(g, prof.compose(gauge_jet(g, p)), p);
}

RadialProfile negated(const RadialProfile& prof) {
  return {"-" + prof.name, [f = prof.f](double r) { return -f(r); }, [f = prof.df](double r) { return -f(r); },
          [f = prof.d2f](double r) { return -f(r); }};
}

RadialProfile ubar_profile() {
  auto f = [](double r) {
    return r < 1.0 ? (15.0 - 10.0 * r * r + 3.0 * r * r * r * r) / 8.0 : 1.0 / r;
  };
  auto df = [](double r) { return r < 1.0 ? (-20.0 * r + 12.0 * r * r * r) / 8.0 : -1.0 / (r * r); };
  auto d2f = [](double r) { return r < 1.0 ? (-20.0 + 36.0 * r * r) / 8.0 : 2.0 / (r * r * r); };
  return {"ubar", f, df, d2f};
}

SamplePlan certificate_plan(const SamplePlan& plan) {
  SamplePlan p = plan;
  p.abs_tol = kCertTol;
  p.rel_tol = 0.0;
  return p;
}

void require_geometry(bool ok, const std::string& id, const std::string& what) {
  if (!ok) {
    throw std::invalid_argument(id + ": " + what);
  }
}

} // namespace

OptimalityValues optimality_drift_values(const GeometrySpec& g, const Ellipticity& ell, double delta, const Point& p) {
  require_geometry(g.kind == GeometryKind::HType7, "optimality_drift", "needs HType7");
  ell.validate();
  const double Q = g.homogeneous_dim();
  const double beta = ell.Lambda / ell.lambda * (Q - 1.0) + 1.0;
  const Taylor2 rho = gauge_jet(g, p);
  const double r = rho.value();
  const HorizontalJet jr = horizontal_jet(g, rho, p);
  const HorizontalJet ju = horizontal_jet(g, profile_shifted_power(-0.5 * delta).compose(rho), p);
  const double s = 1.0 + r * r;
  const Eigen::VectorXd b = ell.lambda * (2.0 - beta + delta) * r / s * jr.hgrad;
  OptimalityValues out;
  out.rho = r;
  out.residual = pucci_plus(ell, ju.hhess) - b.dot(ju.hgrad);
  out.literal_bound = beta * ell.lambda * delta * std::pow(s, -0.5 * delta - 2.0);
  out.bound = jr.hgrad.squaredNorm() * out.literal_bound;
  return out;
}

namespace {

CheckReport certify_optimality(const GeometrySpec& g, const SamplePlan& plan, const CertifyOptions& opts, bool literal) {
  const std::string id = literal ? "optimality_drift_literal" : "optimality_drift";
  require_geometry(g.kind == GeometryKind::HType7, id, "needs HType7");
  if (!(opts.delta > 0.0)) {
    throw std::invalid_argument(id + ": delta must be positive");
  }
  const SamplePlan cp = certificate_plan(plan);
  auto f = [&](const Point& p, double) {
    const OptimalityValues v = optimality_drift_values(g, opts.ell, opts.delta, p);
    detail::SampleEval e;
    e.lhs = literal ? v.literal_bound : v.bound;
    e.rhs = v.residual;
    detail::settle(e, cp, 0.0);
    return e;
  };
  const auto s = detail::run_samples(g, doubling_ladder(plan.r0, plan.rungs), cp, detail::stream_of("certify:optimality_drift"), f);
  CheckReport rep = detail::aggregate(id, g, cp, s, false);
  const double Q = g.homogeneous_dim();
  rep.quantity_name = "residual_minus_bound";
  rep.extra["delta"] = opts.delta;
  rep.extra["lambda"] = opts.ell.lambda;
  rep.extra["Lambda"] = opts.ell.Lambda;
  rep.extra["beta"] = opts.ell.Lambda / opts.ell.lambda * (Q - 1.0) + 1.0;
  rep.extra["bound"] = literal ? "beta*lambda*delta*(1+rho^2)^(-delta/2-2)"
                               : "beta*lambda*delta*|D_X rho|^2*(1+rho^2)^(-delta/2-2)";
  return rep;
}

} // namespace

CheckReport optimality_drift_literal(const GeometrySpec& g, const SamplePlan& plan, const CertifyOptions& opts) {
  return certify_optimality(g, plan, opts, true);
}

CheckReport certify_counterexample(const std::string& id, const GeometrySpec& g, const SamplePlan& plan,
                                   const CertifyOptions& opts) {
  if (id == "optimality_drift") {
    return certify_optimality(g, plan, opts, false);
  }
  const SamplePlan cp = certificate_plan(plan);
  const auto rungs = doubling_ladder(plan.r0, plan.rungs);
  const double Q = g.homogeneous_dim();
  if (id == "nonex_u1") {
    require_geometry(g.is_step2_group(), id, "needs a step-2 group");
    const RadialProfile u1 = profile_shifted_power(1.0 - 0.5 * Q);
    const bool has_closed = g.kind != GeometryKind::FreeStep2 || g.r == 2;
    auto f = [&](const Point& p, double rho) {
      const double lap = radial_jet(g, u1, p).hhess.trace();
      detail::SampleEval e;
      e.lhs = 0.0;
      e.rhs = -lap;
      detail::settle(e, cp, 0.0);
      if (has_closed) {
        const double closed =
            -gauge_hgrad_norm_sq_closed(g, p) * Q * (Q - 2.0) * std::pow(1.0 + rho * rho, -1.0 - 0.5 * Q);
        e.aux = std::abs(closed - lap);
      }
      return e;
    };
    const auto s = detail::run_samples(g, rungs, cp, detail::stream_of("certify:" + id), f);
    CheckReport rep = detail::aggregate(id, g, cp, s, false);
    rep.quantity_name = "minus_sublaplacian";
    rep.extra["u"] = "(1+rho^2)^(1-Q/2)";
    if (has_closed) {
      double worst = 0.0;
      for (const auto& e : s.evals) {
        if (e.status == detail::SampleStatus::Ok) {
          worst = std::max(worst, e.aux);
        }
      }
      rep.extra["closed_form_max_abs_diff"] = worst;
    }
    return rep;
  }
  if (id == "grushin_ubar") {
    require_geometry(g.is_grushin_plane(), id, "needs the Grushin plane");
    const RadialProfile ub = ubar_profile();
    auto f = [&](const Point& p, double) {
      detail::SampleEval e;
      e.lhs = 0.0;
      e.rhs = -radial_jet(g, ub, p).hhess.trace();
      detail::settle(e, cp, 0.0);
      return e;
    };
    const auto s = detail::run_samples(g, rungs, cp, detail::stream_of("certify:" + id), f);
    CheckReport rep = detail::aggregate(id, g, cp, s, false);
    rep.quantity_name = "minus_sublaplacian";
    const double v_in = (15.0 - 10.0 + 3.0) / 8.0;
    const double v_out = 1.0;
    const double d_in = (-20.0 + 12.0) / 8.0;
    const double d_out = -1.0;
    const double c0 = std::abs(v_in - v_out);
    const double c1 = std::abs(d_in - d_out);
    rep.extra["match"] = {{"value_inner", v_in}, {"value_outer", v_out}, {"derivative_inner", d_in},
                          {"derivative_outer", d_out}, {"c0_gap", c0}, {"c1_gap", c1}};
    if (!(c0 <= kCertTol && c1 <= kCertTol)) {
      rep.notes.push_back("C1 matching at rho = 1 failed");
      rep.verdict = Verdict::Violated;
      Witness w;
      w.rho = 1.0;
      w.lhs = std::max(c0, c1);
      w.rhs = kCertTol;
      w.margin = kCertTol - w.lhs;
      rep.witnesses.insert(rep.witnesses.begin(), w);
      ++rep.violation_count;
    }
    return rep;
  }
  if (id == "hg_subsolution") {
    require_geometry(g.kind == GeometryKind::HeisenbergGreiner, id, "needs HeisenbergGreiner");
    const RadialProfile u = negated(profile_shifted_power(-0.5 * (Q - 2.0)));
    auto f = [&](const Point& p, double) {
      detail::SampleEval e;
      e.lhs = 0.0;
      e.rhs = radial_jet(g, u, p).hhess.trace();
      detail::settle(e, cp, 0.0);
      return e;
    };
    const auto s = detail::run_samples(g, rungs, cp, detail::stream_of("certify:" + id), f);
    CheckReport rep = detail::aggregate(id, g, cp, s, false);
    rep.quantity_name = "sublaplacian";
    rep.extra["u"] = "-(1+N^2)^(-(Q-2)/2)";
    return rep;
  }
  throw std::invalid_argument("unknown counterexample id: " + id);
}

std::string to_string(FundamentalKind k) {
  switch (k) {
  case FundamentalKind::Phi1:
    return "Phi1";
  case FundamentalKind::Phi2:
    return "Phi2";
  case FundamentalKind::Psi1:
    return "Psi1";
  case FundamentalKind::Psi2:
    return "Psi2";
  case FundamentalKind::Kaplan:
    return "Kaplan";
  }
  return "";
}

FundamentalKind fundamental_kind_from_string(const std::string& s) {
  for (auto k : {FundamentalKind::Phi1, FundamentalKind::Phi2, FundamentalKind::Psi1, FundamentalKind::Psi2,
                 FundamentalKind::Kaplan}) {
    if (to_string(k) == s) {
      return k;
    }
  }
  throw std::invalid_argument("unknown fundamental profile kind: " + s);
}

namespace {

// C1 rho^e + C2, or C1 log rho + C2 when e == 0.
RadialProfile power_or_log(double C1, double e, double C2) {
  if (e == 0.0) {
    return {"log", [=](double r) { return C1 * std::log(r) + C2; }, [=](double r) { return C1 / r; },
            [=](double r) { return -C1 / (r * r); }};
  }
  return {"power", [=](double r) { return C1 * std::pow(r, e) + C2; }, [=](double r) { return C1 * e * std::pow(r, e - 1.0); },
          [=](double r) { return C1 * e * (e - 1.0) * std::pow(r, e - 2.0); }};
}

} // namespace

FundamentalProfile fundamental_profile(FundamentalKind kind, const Ellipticity& ell, double Q, double C1, double C2) {
  ell.validate();
  if (!(C1 > 0.0)) {
    throw std::invalid_argument("fundamental_profile: C1 must be positive");
  }
  if (!(Q > 2.0)) {
    throw std::invalid_argument("fundamental_profile: Q must exceed 2");
  }
  FundamentalProfile out;
  out.kind = kind;
  out.alpha = ell.lambda / ell.Lambda * (Q - 1.0) + 1.0;
  out.beta = ell.Lambda / ell.lambda * (Q - 1.0) + 1.0;
  auto phi1 = [&]() {
    const double e = 2.0 - out.alpha;
    if (std::abs(e) <= 1e-14) {
      return power_or_log(C1, 0.0, C2);
    }
    return power_or_log(e < 0.0 ? -C1 : C1, e, C2);
  };
  auto phi2 = [&]() { return power_or_log(C1, 2.0 - out.beta, C2); };
  switch (kind) {
  case FundamentalKind::Phi1:
    out.profile = phi1();
    break;
  case FundamentalKind::Phi2:
    out.profile = phi2();
    break;
  case FundamentalKind::Psi1:
    out.profile = negated(phi2());
    break;
  case FundamentalKind::Psi2:
    out.profile = negated(phi1());
    break;
  case FundamentalKind::Kaplan:
    out.profile = power_or_log(C1, 2.0 - Q, C2);
    break;
  }
  out.profile.name = to_string(kind);
  return out;
}

CheckReport fundamental_residual_check(const GeometrySpec& g, FundamentalKind kind, const Ellipticity& ell, double r0, double r1,
                                       const SamplePlan& plan, double C1, double C2) {
  const FundamentalProfile fp = fundamental_profile(kind, ell, g.homogeneous_dim(), C1, C2);
  constexpr double kRel = 1e-8;
  auto f = [&](const Point& p, double) {
    const HorizontalJet j = radial_jet(g, fp.profile, p);
    const Spectrum sp = spectrum(j.hhess);
    double scale = 0.0;
    for (double e : sp.eigenvalues) {
      scale += std::abs(e);
    }
    double res = 0.0;
    switch (kind) {
    case FundamentalKind::Phi1:
    case FundamentalKind::Phi2:
      res = pucci_plus(ell, sp);
      scale *= ell.Lambda;
      break;
    case FundamentalKind::Psi1:
    case FundamentalKind::Psi2:
      res = pucci_minus(ell, sp);
      scale *= ell.Lambda;
      break;
    case FundamentalKind::Kaplan:
      res = -j.hhess.trace();
      break;
    }
    detail::SampleEval e;
    e.lhs = std::abs(res);
    e.rhs = kRel * scale;
    e.margin = e.rhs - e.lhs;
    e.failed = e.margin < 0.0;
    e.quantity = {res};
    return e;
  };
  const auto s = detail::run_samples(g, detail::split_annulus(r0, r1, plan.rungs), plan,
                                     detail::stream_of("fundamental:" + to_string(kind)), f);
  CheckReport rep = detail::aggregate("fundamental", g, plan, s, false);
  rep.quantity_name = "residual";
  rep.extra["kind"] = to_string(kind);
  rep.extra["alpha"] = fp.alpha;
  rep.extra["beta"] = fp.beta;
  rep.extra["annulus"] = {r0, r1};
  rep.extra["relative_tolerance"] = kRel;
  return rep;
}

} // namespace subriem
