// Acceptance run: one PASS/FAIL line per criterion.
// Exit status is nonzero when an attainable criterion fails; lines tagged "expected red" do not count.

#include "oracles.hpp"

#include "subriem/cli.hpp"
#include "subriem/config.hpp"
#include "subriem/liouville.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace subriem;
using json = nlohmann::json;

namespace {

int failures = 0;

void line(const std::string& label, bool ok, const std::string& detail, bool expected_red = false) {
  std::cout << label << ": " << (ok ? "PASS" : "FAIL") << "  " << detail;
  if (expected_red) {
    std::cout << "  [expected red]";
  }
  std::cout << '\n';
  if (!ok && !expected_red) {
    ++failures;
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string config_path(const std::string& name) { return std::string(SUBRIEM_SOURCE_DIR) + "/configs/" + name + ".json"; }

RunConfig load(const std::string& name) { return load_config(read_json_file(config_path(name)), config_path(name)); }

std::vector<RadialProfile> profiles_for(const GeometrySpec& g) {
  const double Q = g.homogeneous_dim();
  return {profile_identity(), profile_log(), profile_power(2.0 - Q), profile_shifted_power(1.0 - 0.5 * Q), profile_power(3.0),
          profile_from_expr(parse_radial("(1+rho^2)^-0.05"))};
}

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<GeometrySpec> gs = {GeometrySpec::htype7(), GeometrySpec::free_step2(3), GeometrySpec::heisenberg(2),
                                        GeometrySpec::grushin(2, 1, 2.0), GeometrySpec::heisenberg_greiner(1, 2)};
  double worst = 0.0;
  int points = 0;
  for (const auto& g : gs) {
    const auto pts = oracle::shell_points(g, 1000, 0.1, 50.0, 101);
    const auto profs = profiles_for(g);
    for (const auto& p : pts) {
      const Taylor2 rho = gauge_jet(g, p);
      for (const auto& f : profs) {
        const HorizontalJet ad = horizontal_jet(g, f.compose(rho), p);
        const HorizontalJet cf = radial_horizontal_hessian(g, f, p);
        const double err = (ad.hhess - cf.hhess).cwiseAbs().maxCoeff() / (1.0 + cf.hhess.norm());
        worst = std::max(worst, err);
      }
      ++points;
    }
  }
  const double secs = seconds_since(t0);
  line("criterion 1", worst <= 1e-9 && secs < 10.0,
       "AD vs closed-form horizontal Hessians, 5 geometries x " + std::to_string(points / 5) + " points, max scaled error " +
           fmt(worst) + ", " + fmt(secs) + " s");
}

void criterion2() {
  const std::vector<GeometrySpec> gs = {GeometrySpec::htype7(),           GeometrySpec::heisenberg(1),
                                        GeometrySpec::heisenberg(3),      GeometrySpec::grushin_plane(),
                                        GeometrySpec::grushin(2, 1, 2.0), GeometrySpec::grushin(1, 2, 0.5),
                                        GeometrySpec::heisenberg_greiner(1, 2), GeometrySpec::heisenberg_greiner(2, 3)};
  double worst = 0.0;
  for (const auto& g : gs) {
    const RadialProfile f = profile_power(2.0 - g.homogeneous_dim());
    for (const auto& p : oracle::shell_points(g, 1000, 0.5, 20.0, 202)) {
      const Eigen::MatrixXd H = horizontal_jet(g, f.compose(gauge_jet(g, p)), p).hhess;
      double scale = 0.0;
      for (double e : spectrum(H).eigenvalues) {
        scale += std::abs(e);
      }
      if (scale > 0.0) {
        worst = std::max(worst, std::abs(H.trace()) / scale);
      }
    }
  }
  line("criterion 2", worst <= 1e-8,
       "sub-Laplacian of rho^(2-Q) on " + std::to_string(gs.size()) + " geometries x 1000 points, max relative residual " +
           fmt(worst));
}

void criterion3() {
  const auto g = GeometrySpec::htype7();
  SamplePlan plan;
  plan.per_rung = 250;
  plan.rungs = 4;
  bool ok = true;
  bool exact = true;
  double worst = -1.0;
  for (auto [l, L] : std::vector<std::pair<double, double>>{{1, 1}, {1, 2}, {1, 9}}) {
    const Ellipticity ell{l, L};
    const auto fp = fundamental_profile(FundamentalKind::Phi1, ell, 10.0);
    exact = exact && fp.alpha == 9.0 * l / L + 1.0 && fp.beta == 9.0 * L / l + 1.0;
    for (auto k : {FundamentalKind::Phi1, FundamentalKind::Phi2, FundamentalKind::Psi1, FundamentalKind::Psi2}) {
      const auto rep = fundamental_residual_check(g, k, ell, 1.0, 100.0, plan);
      ok = ok && rep.verdict == Verdict::Holds && rep.samples_evaluated == 1000;
      worst = worst < 0 ? rep.min_margin : std::min(worst, rep.min_margin);
    }
  }
  line("criterion 3", ok && exact,
       "Pucci residuals of Phi1, Phi2 (M+) and Psi1, Psi2 (M-) on HType7, 3 ellipticity pairs x 1000 points; alpha/beta exact: " +
           std::string(exact ? "yes" : "no"));
}

void criterion4() {
  std::mt19937_64 rng(404);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int m = 4; m <= 7; ++m) {
    for (int k = 0; k < 100; ++k) {
      const double s = nd(rng), a = nd(rng), b = nd(rng), c = nd(rng);
      const Eigen::VectorXd v = oracle::random_unit(rng, m);
      const Eigen::VectorXd w = oracle::random_unit(rng, m);
      const auto closed = rank2_eigenvalues(s, a, b, c, v, w).eigenvalues;
      const auto ref = oracle::jacobi_eigenvalues(rank2_matrix(s, a, b, c, v, w));
      for (std::size_t i = 0; i < ref.size(); ++i) {
        worst = std::max(worst, std::abs(closed[i] - ref[i]));
      }
    }
  }
  const auto g = GeometrySpec::grushin_plane();
  const Expr u = parse("log(rho)", g);
  double worst_g = 0.0;
  for (const auto& p : oracle::shell_points(g, 1000, 0.5, 10.0, 405)) {
    const double x = p(0), y = p(1);
    const double r4 = std::pow(gauge(g, p), 4);
    const auto e = spectrum(horizontal_jet(g, u, p).hhess).eigenvalues;
    const double tr = x * x / r4;
    const double det = (-2.0 * std::pow(x, 4) - y * y) / (r4 * r4);
    worst_g = std::max(worst_g, std::abs(e[0] + e[1] - tr) / std::max(std::abs(tr), std::abs(e[0]) + std::abs(e[1])));
    worst_g = std::max(worst_g, std::abs(e[0] * e[1] - det) / std::abs(det));
  }
  line("criterion 4", worst <= 1e-10 && worst_g <= 1e-10,
       "rank-2 closed form vs Jacobi, 400 cases, max error " + fmt(worst) + "; Grushin trace/determinant max relative error " +
           fmt(worst_g));
}

void criterion5() {
  SamplePlan plan;
  plan.per_rung = 1000;
  plan.rungs = 10;
  plan.r0 = 0.05;
  const CertifyOptions opts{0.1, Ellipticity{1.0, 2.0}};
  std::ostringstream detail;
  bool ok = true;
  auto run_one = [&](const std::string& id, const GeometrySpec& g) {
    const auto rep = certify_counterexample(id, g, plan, opts);
    const bool good = rep.verdict == Verdict::Holds && rep.violation_count == 0 && rep.samples_evaluated + rep.samples_excluded == 10000;
    ok = ok && good;
    detail << id << "/" << g.name() << "=" << to_string(rep.verdict) << " ";
    return rep;
  };
  run_one("nonex_u1", GeometrySpec::heisenberg(1));
  run_one("nonex_u1", GeometrySpec::htype7());
  run_one("nonex_u1", GeometrySpec::free_step2(2));
  const auto ub = run_one("grushin_ubar", GeometrySpec::grushin_plane());
  const bool match = ub.extra["match"]["c0_gap"].get<double>() <= 1e-12 && ub.extra["match"]["c1_gap"].get<double>() <= 1e-12;
  ok = ok && match;
  run_one("hg_subsolution", GeometrySpec::heisenberg_greiner(1, 2));
  run_one("optimality_drift", GeometrySpec::htype7());
  line("criterion 5", ok, detail.str() + "(optimality bound carries |D_X rho|^2); C0/C1 match " + (match ? "ok" : "failed"));

  const auto lit = optimality_drift_literal(GeometrySpec::htype7(), plan, opts);
  line("criterion 5 literal optimality bound", lit.verdict == Verdict::Holds,
       "bound without |D_X rho|^2: " + std::to_string(lit.violation_count) + " of " + std::to_string(lit.samples_evaluated) +
           " samples below it",
       true);

  const auto f3 = certify_counterexample("nonex_u1", GeometrySpec::free_step2(3), plan, opts);
  std::cout << "note: nonex_u1 on FreeStep2(3) is " << to_string(f3.verdict) << " (rho_F is not a sub-Laplacian gauge for r >= 3)\n";
}

void criterion6() {
  const std::vector<std::string> names = {"condH_c0", "condcor1free",    "condcor1freepucci", "Grucond",
                                          "condcor1grushin", "condcor1", "condgen",           "OUtype"};
  bool ok = true;
  std::ostringstream detail;
  for (const auto& n : names) {
    const RunConfig cfg = load(n);
    const auto rep = check_condition(cfg.check.id, cfg.geometry, *cfg.op, cfg.plan, cfg.check.options);
    bool good = rep.verdict == Verdict::Holds && rep.onset_radius.has_value();
    if (good) {
      const double R = *rep.onset_radius;
      const auto ly = verify_lyapunov(cfg.geometry, *cfg.op, paired_candidate(cfg.check.id, *cfg.op), R, 4.0 * R, cfg.plan);
      good = ly.verdict == Verdict::Holds;
      detail << n << "(R*=" << fmt(R) << ") ";
    } else {
      detail << n << "=" << to_string(rep.verdict) << " ";
    }
    ok = ok && good;
  }
  const RunConfig sub = load("sublaplacian_b0c0");
  const auto srep = check_condition(sub.check.id, sub.geometry, *sub.op, sub.plan);
  ok = ok && srep.verdict == Verdict::Violated;
  detail << "sublaplacian_b0c0=" << to_string(srep.verdict);
  line("criterion 6", ok, detail.str());
}

void criterion7() {
  const auto a = liohad_gate(Ellipticity{1, 9}, 10.0);
  const auto b = liohad_gate(Ellipticity{1, 8}, 10.0);
  const RunConfig cfg = load("liohad_boundary");
  const auto c = check_condition("liohad_gate", cfg.geometry, *cfg.op, cfg.plan);
  line("criterion 7", a.verdict == Verdict::Holds && b.verdict == Verdict::Violated && c.verdict == Verdict::Holds,
       "(1,9,10)=" + to_string(a.verdict) + " (1,8,10)=" + to_string(b.verdict) + " config=" + to_string(c.verdict));
}

void criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = load("growth_u1");
  const auto r = growth_probe(cfg.geometry, parse(cfg.growth.u, cfg.geometry), cfg.growth.c, cfg.growth.nu, cfg.plan,
                              cfg.growth.options);
  const double secs = seconds_since(t0);
  const std::size_t n = r.rungs.size();
  double spread = 1.0;
  if (n >= 3) {
    const double a = r.rungs[n - 3].scaled_q2, b = r.rungs[n - 2].scaled_q2, c = r.rungs[n - 1].scaled_q2;
    spread = (std::max({a, b, c}) - std::min({a, b, c})) / std::max({std::abs(a), std::abs(b), std::abs(c)});
  }
  const bool radii = n == 7 && r.rungs.front().r == 16.0 && r.rungs.back().r == 1024.0;
  line("criterion 8",
       radii && r.trend_q2 == Trend::Bounded && spread < 0.1 && r.trend_nu == Trend::Diverging && secs < 30.0,
       "exponent Q-2: " + to_string(r.trend_q2) + " (spread " + fmt(spread) + "), exponent (Q-2)/(1-nu): " + to_string(r.trend_nu) +
           ", " + fmt(secs) + " s");
}

void criterion9() {
  bool ok = true;
  int count = 0;
  std::vector<std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(std::string(SUBRIEM_SOURCE_DIR) + "/configs")) {
    if (e.path().extension() == ".json") {
      files.push_back(e.path().string());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const std::string task = read_json_file(f)["task"];
    std::string first;
    for (const std::string w : {"1", "4", "16"}) {
      std::ostringstream out, err;
      run({task, "--config", f, "--workers", w}, out, err);
      if (w == "1") {
        first = out.str();
        ok = ok && !first.empty();
      } else {
        ok = ok && out.str() == first;
      }
    }
    ++count;
  }
  line("criterion 9", ok && count > 0, std::to_string(count) + " configs, reports byte-identical under 1, 4 and 16 workers");
}

} // namespace

int main() {
  try {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << '\n';
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
