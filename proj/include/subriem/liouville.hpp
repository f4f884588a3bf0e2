#pragma once

#include "subriem/expr.hpp"
#include "subriem/extremal.hpp"
#include "subriem/geometry.hpp"
#include "subriem/hcalc.hpp"
#include "subriem/kernels.hpp"
#include "subriem/report.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace subriem {

enum class HamiltonianMode { Inf, Sup };
enum class DriftFrame { Horizontal, Euclidean };

std::string to_string(HamiltonianMode m);
std::string to_string(DriftFrame f);

/// One (b^alpha, c^alpha) pair. An empty b is the zero field, an empty c is 0.
struct Coefficient {
  VectorExpr b;
  Expr c;
};

struct CoefficientFamily {
  std::vector<Coefficient> entries;
  HamiltonianMode mode = HamiltonianMode::Inf;
  DriftFrame frame = DriftFrame::Horizontal;

  bool is_singleton() const { return entries.size() <= 1; }
  /// True when every c is absent or the literal constant 0.
  bool c_is_zero() const;
  /// Length b must have on g.
  int drift_dim(const GeometrySpec& g) const;
  void validate(const GeometrySpec& g) const;
};

enum class SecondOrderKind { MMinus, MPlus, P66Minus, P66Plus, NegTraceA };

std::string to_string(SecondOrderKind k);

struct OperatorSpec {
  SecondOrderKind kind = SecondOrderKind::MMinus;
  Ellipticity ell;
  Pucci66Param p66;
  /// Scalar a(x) of -a(x) Tr M.
  Expr a;
  CoefficientFamily coeffs;

  /// Checks constants, arities and the operator/mode pairing.
  void validate(const GeometrySpec& g) const;
  /// F(M) at p.
  double second_order(const Eigen::MatrixXd& M, const Point& p) const;
};

/// Minus operators become plus operators and Inf becomes Sup, with the same coefficients.
OperatorSpec mirrored(const OperatorSpec& op);

/// inf (or sup) over alpha of c^alpha(p) r - b^alpha(p) . grad
double hamiltonian(const CoefficientFamily& coeffs, const Point& p, double r, const Eigen::VectorXd& grad);

struct ResidualParts {
  double second_order = 0.0;
  double first_order = 0.0;
  double total = 0.0;
  /// Size of the largest term entering the sum, for relative tolerances.
  double scale = 0.0;
};

ResidualParts pde_residual_parts(const GeometrySpec& g, const OperatorSpec& op, const HorizontalJet& jet, const Point& p);
double pde_residual(const GeometrySpec& g, const OperatorSpec& op, const Expr& u, const Point& p);
double pde_residual(const GeometrySpec& g, const OperatorSpec& op, const HorizontalJet& jet, const Point& p);

enum class CandidateShape { LogRho, NegLogRho, RhoSquared, Custom };

struct LyapunovCandidate {
  CandidateShape shape = CandidateShape::LogRho;
  std::string custom;
  /// +1 for exhaustion functions w, -1 for W. Fixed by the shape except for Custom.
  int sign = 1;

  static LyapunovCandidate log_rho() { return {CandidateShape::LogRho, "", 1}; }
  static LyapunovCandidate neg_log_rho() { return {CandidateShape::NegLogRho, "", -1}; }
  static LyapunovCandidate rho_squared() { return {CandidateShape::RhoSquared, "", 1}; }
  static LyapunovCandidate custom_expr(const std::string& src, int sign) { return {CandidateShape::Custom, src, sign}; }

  bool positive() const { return sign > 0; }
  std::string source() const;
  std::string name() const;
  Expr expr(const GeometrySpec& g) const;
};

/// Candidate with gauge in [r0, r1] sampled over plan.rungs log-equal shells.
CheckReport verify_lyapunov(const GeometrySpec& g, const OperatorSpec& op, const LyapunovCandidate& cand, double r0, double r1,
                            const SamplePlan& plan);

const std::vector<std::string>& condition_ids();

struct ConditionOptions {
  /// OUtype weights gamma_i; empty means all ones.
  std::vector<double> gamma;
};

CheckReport check_condition(const std::string& id, const GeometrySpec& g, const OperatorSpec& op, const SamplePlan& plan,
                            const ConditionOptions& opts = {});

/// The Lyapunov candidate whose supersolution (or subsolution) property the condition encodes.
LyapunovCandidate paired_candidate(const std::string& id, const OperatorSpec& op);

/// Holds iff Q - 1 <= Lambda/lambda.
CheckReport liohad_gate(const Ellipticity& ell, double Q);

const std::vector<std::string>& counterexample_ids();

struct CertifyOptions {
  double delta = 0.1;
  Ellipticity ell{1.0, 2.0};
};

CheckReport certify_counterexample(const std::string& id, const GeometrySpec& g, const SamplePlan& plan,
                                   const CertifyOptions& opts = {});

struct OptimalityValues {
  /// M+(D_X^2 u)* - b . D_X u
  double residual = 0.0;
  /// beta lambda delta |D_X rho|^2 (1+rho^2)^(-delta/2-2)
  double bound = 0.0;
  /// beta lambda delta (1+rho^2)^(-delta/2-2)
  double literal_bound = 0.0;
  double rho = 0.0;
};

/// Drift b = lambda (2 - beta + delta) rho/(1+rho^2) D_X rho tested on u = (1+rho^2)^(-delta/2); HType7 only.
OptimalityValues optimality_drift_values(const GeometrySpec& g, const Ellipticity& ell, double delta, const Point& p);

/// Pointwise check of the bound without the |D_X rho|^2 factor.
CheckReport optimality_drift_literal(const GeometrySpec& g, const SamplePlan& plan, const CertifyOptions& opts = {});

enum class FundamentalKind { Phi1, Phi2, Psi1, Psi2, Kaplan };

std::string to_string(FundamentalKind k);
FundamentalKind fundamental_kind_from_string(const std::string& s);

struct FundamentalProfile {
  RadialProfile profile;
  double alpha = 0.0;
  double beta = 0.0;
  FundamentalKind kind = FundamentalKind::Phi1;
};

FundamentalProfile fundamental_profile(FundamentalKind kind, const Ellipticity& ell, double Q, double C1 = 1.0, double C2 = 0.0);

/// Residual of the profile under the operator it solves (M+ for Phi, M- for Psi, -Delta for Kaplan) on [r0, r1].
CheckReport fundamental_residual_check(const GeometrySpec& g, FundamentalKind kind, const Ellipticity& ell, double r0, double r1,
                                       const SamplePlan& plan, double C1 = 1.0, double C2 = 0.0);

enum class Trend { Bounded, Diverging, Undetermined };

std::string to_string(Trend t);

struct GrowthRung {
  double r = 0.0;
  double sup = 0.0;
  double scaled_q2 = 0.0;
  double scaled_nu = 0.0;
  bool overflow = false;
  Eigen::VectorXd argmax;
};

struct GrowthProbeResult {
  std::string geometry;
  double Q = 0.0;
  double nu = 0.5;
  double c = 0.0;
  double exponent_q2 = 0.0;
  double exponent_nu = 0.0;
  std::vector<GrowthRung> rungs;
  Trend trend_q2 = Trend::Undetermined;
  Trend trend_nu = Trend::Undetermined;
};

struct GrowthOptions {
  int refine_rounds = 3;
  double shrink = 0.25;
};

/// Sup of u - c over each shell {r_j <= rho <= 2 r_j}, r_j = r0 2^j, with scaled trends.
GrowthProbeResult growth_probe(const GeometrySpec& g, const Expr& u, double c, double nu, const SamplePlan& plan,
                               const GrowthOptions& opts = {});

/// Bounded if the last three values vary by < 10%, diverging if each step grows by > 2x.
Trend classify_trend(const std::vector<double>& values);

nlohmann::json to_json(const GrowthProbeResult& r);

/// Premise check for the comparison principle: u sub, v super, (u - v)/w growth, and the Lyapunov property of w.
CheckReport comparison_verdict(const GeometrySpec& g, const OperatorSpec& op, const Expr& u, const Expr& v,
                               const LyapunovCandidate& cand, const SamplePlan& plan);

struct ResidualRow {
  Eigen::VectorXd point;
  double rho = 0.0;
  double residual = 0.0;
};

/// Residual of u at seeded ladder samples (r0 2^j shells).
std::vector<ResidualRow> residual_table(const GeometrySpec& g, const OperatorSpec& op, const Expr& u, const SamplePlan& plan);

/// Doubling ladder radii [r0 2^j, r0 2^(j+1)].
std::vector<std::pair<double, double>> doubling_ladder(double r0, int rungs);

} // namespace subriem
