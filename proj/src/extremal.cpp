#include "subriem/extremal.hpp"

#include "subriem/expr.hpp"
#include "subriem/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace subriem {

void Ellipticity::validate() const {
  if (!(lambda > 0.0) || !(lambda <= Lambda) || !std::isfinite(Lambda)) {
    std::ostringstream os;
    os << "ellipticity constants must satisfy 0 < lambda <= Lambda (got " << lambda << ", " << Lambda << ")";
    throw std::invalid_argument(os.str());
  }
}

void Pucci66Param::validate() const {
  if (m < 1 || !(lam > 0.0) || !(lam * m <= 1.0)) {
    std::ostringstream os;
    os << "Pucci66 parameter must satisfy 0 < lam <= 1/m (got lam=" << lam << ", m=" << m << ")";
    throw std::invalid_argument(os.str());
  }
}

void check_symmetric(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) {
    throw std::invalid_argument("matrix is not square");
  }
  const double norm = M.cwiseAbs().maxCoeff();
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= 1e-12 * norm)) {
    throw std::invalid_argument("matrix is not symmetric");
  }
}

namespace {

double pair_residual(const Eigen::MatrixXd& M, const std::vector<double>& eig) {
  // Smallest singular value of M - eI measures how well e is an eigenvalue.
  double worst = 0.0;
  const int m = static_cast<int>(M.rows());
  for (double e : eig) {
    Eigen::MatrixXd shifted = M - e * Eigen::MatrixXd::Identity(m, m);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(shifted);
    worst = std::max(worst, svd.singularValues()(m - 1));
  }
  return worst;
}

} // namespace

Spectrum spectrum(const Eigen::MatrixXd& M) {
  check_symmetric(M);
  Spectrum s;
  const int m = static_cast<int>(M.rows());
  if (m == 0) {
    return s;
  }
  if (m == 1) {
    s.eigenvalues = {M(0, 0)};
    return s;
  }
  if (m == 2) {
    const double a = M(0, 0);
    const double d = M(1, 1);
    const double b = 0.5 * (M(0, 1) + M(1, 0));
    const double mean = 0.5 * (a + d);
    const double rad = std::hypot(0.5 * (a - d), b);
    s.eigenvalues = {mean - rad, mean + rad};
    for (double e : s.eigenvalues) {
      Eigen::Vector2d v1(b, e - a);
      Eigen::Vector2d v2(e - d, b);
      Eigen::Vector2d v = v1.norm() >= v2.norm() ? v1 : v2;
      if (v.norm() == 0.0) {
        continue;
      }
      v.normalize();
      s.residual = std::max(s.residual, (M * v - e * v).norm());
    }
    return s;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigensolver failed to converge");
  }
  const Eigen::VectorXd& ev = solver.eigenvalues();
  s.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
  const Eigen::MatrixXd R = M * solver.eigenvectors() - solver.eigenvectors() * ev.asDiagonal();
  s.residual = R.colwise().norm().maxCoeff();
  return s;
}

Eigen::MatrixXd rank2_matrix(double s, double a, double b, double c, const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  const int m = static_cast<int>(v.size());
  return s * Eigen::MatrixXd::Identity(m, m) + a * v * v.transpose() + b * w * w.transpose() +
         c * (v * w.transpose() + w * v.transpose());
}

Spectrum rank2_eigenvalues(double s, double a, double b, double c, const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
  if (v.size() != w.size() || v.size() < 1) {
    throw DimensionError("rank2_eigenvalues: v and w must have the same positive length");
  }
  if (std::abs(v.norm() - 1.0) > 1e-10 || std::abs(w.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("rank2_eigenvalues: v and w must be unit vectors");
  }
  const int m = static_cast<int>(v.size());
  const double k = v.dot(w);
  const double A = a + b + 2.0 * c * k;
  const double gap = std::max(0.0, 1.0 - k * k);
  const double cross = c * c - a * b;
  const double scale = c * c + std::abs(a * b);
  Spectrum out;
  const bool degenerate = gap <= 1e-14 || std::abs(cross) <= 1e-14 * scale;
  if (degenerate || m == 1) {
    out.eigenvalues.assign(static_cast<std::size_t>(m - 1), s);
    out.eigenvalues.push_back(s + A);
  } else {
    // Roots of z^2 - A z - gap*cross = 0, computed without cancellation.
    const double disc = std::max(0.0, A * A + 4.0 * gap * cross);
    const double big = 0.5 * (A + std::copysign(std::sqrt(disc), A));
    const double small = big != 0.0 ? -(gap * cross) / big : 0.0;
    out.eigenvalues.assign(static_cast<std::size_t>(m - 2), s);
    out.eigenvalues.push_back(s + big);
    out.eigenvalues.push_back(s + small);
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  out.residual = pair_residual(rank2_matrix(s, a, b, c, v, w), out.eigenvalues);
  return out;
}

double zero_band(const Spectrum& s) {
  double norm = 0.0;
  for (double e : s.eigenvalues) {
    norm = std::max(norm, std::abs(e));
  }
  return 1e-12 * norm;
}

namespace {

void split_sums(const Spectrum& s, double& pos, double& neg) {
  const double band = zero_band(s);
  pos = 0.0;
  neg = 0.0;
  for (double e : s.eigenvalues) {
    if (e > band) {
      pos += e;
    } else if (e < -band) {
      neg += e;
    }
  }
}

} // namespace

double pucci_plus(const Ellipticity& ell, const Spectrum& s) {
  double pos = 0.0;
  double neg = 0.0;
  split_sums(s, pos, neg);
  return -ell.lambda * pos - ell.Lambda * neg;
}

double pucci_minus(const Ellipticity& ell, const Spectrum& s) {
  double pos = 0.0;
  double neg = 0.0;
  split_sums(s, pos, neg);
  return -ell.Lambda * pos - ell.lambda * neg;
}

double pucci_plus(const Ellipticity& ell, const Eigen::MatrixXd& M) { return pucci_plus(ell, spectrum(M)); }
double pucci_minus(const Ellipticity& ell, const Eigen::MatrixXd& M) { return pucci_minus(ell, spectrum(M)); }

namespace {

double trace_of(const Spectrum& s) {
  double t = 0.0;
  for (double e : s.eigenvalues) {
    t += e;
  }
  return t;
}

} // namespace

double pucci66_plus(const Pucci66Param& p, const Spectrum& s) {
  p.validate();
  if (static_cast<int>(s.eigenvalues.size()) != p.m) {
    throw DimensionError("pucci66: matrix size does not match the parameter dimension");
  }
  return -p.lam * trace_of(s) - (1.0 - p.m * p.lam) * s.eigenvalues.front();
}

double pucci66_minus(const Pucci66Param& p, const Spectrum& s) {
  p.validate();
  if (static_cast<int>(s.eigenvalues.size()) != p.m) {
    throw DimensionError("pucci66: matrix size does not match the parameter dimension");
  }
  return -p.lam * trace_of(s) - (1.0 - p.m * p.lam) * s.eigenvalues.back();
}

double pucci66_plus(const Pucci66Param& p, const Eigen::MatrixXd& M) { return pucci66_plus(p, spectrum(M)); }
double pucci66_minus(const Pucci66Param& p, const Eigen::MatrixXd& M) { return pucci66_minus(p, spectrum(M)); }

namespace {

struct ProbeSample {
  bool failed = false;
  bool error = false;
  double slack = 0.0;
  double lhs = 0.0; // G(M) - G(N)
  double lo = 0.0;  // M-(M-N)
  double hi = 0.0;  // M+(M-N)
  Eigen::VectorXd x;
};

Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd A(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      A(i, j) = normal(rng);
    }
  }
  return 0.5 * (A + A.transpose());
}

} // namespace

CheckReport subellipticity_probe(const Expr& G, const Ellipticity& ell, const SamplePlan& plan) {
  ell.validate();
  if (G.context() != ExprContext::Operator) {
    throw std::invalid_argument("subellipticity_probe needs an operator expression");
  }
  const GeometrySpec& g = G.geometry();
  const int m = G.operator_dim();
  const std::size_t n = static_cast<std::size_t>(plan.per_rung) * static_cast<std::size_t>(std::max(1, plan.rungs));
  auto eval_one = [&](std::size_t i) {
    ProbeSample out;
    std::mt19937_64 rng = sample_rng(plan.seed, 0x5eb, i);
    std::normal_distribution<double> normal;
    OperatorArgs a;
    a.x = Point(g.ambient_dim());
    for (int k = 0; k < a.x.size(); ++k) {
      a.x(k) = normal(rng);
    }
    a.r = normal(rng);
    a.p = Eigen::VectorXd(m);
    for (int k = 0; k < m; ++k) {
      a.p(k) = normal(rng);
    }
    a.M = random_symmetric(rng, m);
    OperatorArgs b = a;
    b.M = random_symmetric(rng, m);
    out.x = a.x;
    try {
      const double ga = eval_operator(G, a);
      const double gb = eval_operator(G, b);
      const Spectrum s = spectrum(a.M - b.M);
      out.lhs = ga - gb;
      out.lo = pucci_minus(ell, s);
      out.hi = pucci_plus(ell, s);
      const double tol = one_sided_tolerance(plan, std::max({std::abs(ga), std::abs(gb), std::abs(out.lo), std::abs(out.hi)}));
      out.slack = std::min(out.lhs - out.lo, out.hi - out.lhs);
      out.failed = out.slack < -tol;
    } catch (const EvalError&) {
      out.error = true;
    }
    return out;
  };
  const auto results = map_samples_parallel<ProbeSample>(n, eval_one, plan.workers);

  CheckReport rep;
  rep.id = "subellipticity";
  rep.geometry = g.name();
  rep.seed = plan.seed;
  rep.per_rung = plan.per_rung;
  rep.rungs = plan.rungs;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (r.error) {
      ++rep.samples_excluded;
      continue;
    }
    ++rep.samples_evaluated;
    rep.min_margin = std::min(rep.min_margin, r.slack);
    if (r.failed) {
      ++rep.violation_count;
      if (rep.witnesses.size() < CheckReport::kMaxWitnesses) {
        Witness w;
        w.index = i;
        w.point = r.x;
        w.lhs = r.lhs;
        w.rhs = r.slack == r.lhs - r.lo ? r.lo : r.hi;
        w.margin = r.slack;
        rep.witnesses.push_back(w);
      }
    }
  }
  rep.excluded_fraction = n > 0 ? static_cast<double>(rep.samples_excluded) / static_cast<double>(n) : 0.0;
  if (rep.samples_evaluated == 0) {
    rep.min_margin = 0.0;
  }
  if (rep.violation_count > 0) {
    rep.verdict = Verdict::Violated;
  } else if (rep.samples_evaluated == 0 || rep.excluded_fraction > plan.max_excluded_fraction) {
    rep.verdict = Verdict::Inconclusive;
  } else {
    rep.verdict = Verdict::Holds;
  }
  return rep;
}

} // namespace subriem
