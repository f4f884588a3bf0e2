#include "subriem/hcalc.hpp"

#include <cmath>
#include <stdexcept>

namespace subriem {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& A) { return 0.5 * (A + A.transpose()); }

Eigen::MatrixXd correction(const GeometrySpec& g, const Point& p, const Eigen::VectorXd& q) {
  check_point(g, p);
  if (q.size() != g.ambient_dim()) {
    throw DimensionError("correction: q has the wrong length");
  }
  const int m = g.rank();
  const Eigen::MatrixXd s = sigma(g, p);
  const auto jac = sigma_jacobians(g, p);
  Eigen::MatrixXd out(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const double v = 0.5 * (jac[j] * s.col(i) + jac[i] * s.col(j)).dot(q);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

HorizontalJet horizontal_jet(const GeometrySpec& g, const Taylor2& u, const Point& p) {
  check_point(g, p);
  if (u.dim() != g.ambient_dim()) {
    throw DimensionError("horizontal_jet: jet dimension does not match the geometry");
  }
  const Eigen::MatrixXd s = sigma(g, p);
  HorizontalJet out;
  out.value = u.value();
  out.grad = u.grad();
  out.hgrad = s.transpose() * u.grad();
  out.hhess = symmetrize(s.transpose() * u.hess() * s + correction(g, p, u.grad()));
  out.nonsmooth = u.nonsmooth();
  return out;
}

HorizontalJet horizontal_jet(const GeometrySpec& g, const Expr& u, const Point& p) {
  return horizontal_jet(g, eval_taylor(u, p), p);
}

HorizontalJet horizontal_jet(const GeometrySpec& g, const NativeFunction& u, const Point& p) {
  check_point(g, p);
  const int n = g.ambient_dim();
  std::vector<Taylor2> x;
  x.reserve(n);
  for (int i = 0; i < n; ++i) {
    x.push_back(Taylor2::variable(p(i), n, i));
  }
  return horizontal_jet(g, u(x), p);
}

RadialProfile profile_identity() {
  return {"rho", [](double r) { return r; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
}

RadialProfile profile_log() {
  return {"log(rho)", [](double r) { return std::log(r); }, [](double r) { return 1.0 / r; },
          [](double r) { return -1.0 / (r * r); }};
}

RadialProfile profile_power(double e) {
  return {"rho^" + std::to_string(e), [e](double r) { return std::pow(r, e); },
          [e](double r) { return e * std::pow(r, e - 1.0); },
          [e](double r) { return e * (e - 1.0) * std::pow(r, e - 2.0); }};
}

RadialProfile profile_shifted_power(double a) {
  return {"(1+rho^2)^" + std::to_string(a), [a](double r) { return std::pow(1.0 + r * r, a); },
          [a](double r) { return 2.0 * a * r * std::pow(1.0 + r * r, a - 1.0); },
          [a](double r) {
            const double s = 1.0 + r * r;
            return 2.0 * a * std::pow(s, a - 1.0) + 4.0 * a * (a - 1.0) * r * r * std::pow(s, a - 2.0);
          }};
}

RadialProfile profile_constant(double c) {
  return {"const", [c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
}

RadialProfile profile_from_expr(const Expr& e) {
  return {print(e), [e](double r) { return eval_radial(e, r).value(); },
          [e](double r) { return eval_radial(e, r).grad()(0); },
          [e](double r) { return eval_radial(e, r).hess()(0, 0); }};
}

double profile_consistency_error(const RadialProfile& prof, const std::vector<double>& grid, double h) {
  double worst = 0.0;
  for (double r : grid) {
    const double fd1 = (prof.f(r + h) - prof.f(r - h)) / (2.0 * h);
    const double fd2 = (prof.df(r + h) - prof.df(r - h)) / (2.0 * h);
    worst = std::max(worst, std::abs(prof.df(r) - fd1) / (1.0 + std::abs(prof.df(r))));
    worst = std::max(worst, std::abs(prof.d2f(r) - fd2) / (1.0 + std::abs(prof.d2f(r))));
  }
  return worst;
}

namespace {

struct Step2Parts {
  Eigen::VectorXd x;
  Eigen::VectorXd t;
  std::vector<Eigen::MatrixXd> mats;
  Eigen::VectorXd mu;
  double rho = 0.0;
};

Step2Parts step2_parts(const GeometrySpec& g, const Point& p) {
  Step2Parts s;
  const int m = g.rank();
  s.x = p.head(m);
  s.t = p.tail(p.size() - m);
  s.mats = step2_matrices(g);
  s.mu = s.x.squaredNorm() * s.x;
  for (std::size_t k = 0; k < s.mats.size(); ++k) {
    s.mu += s.t(static_cast<int>(k)) * (s.mats[k] * s.x);
  }
  s.rho = gauge(g, p);
  return s;
}

// (Jx)_i = x_{i+d}, (Jx)_{i+d} = -x_i
Eigen::VectorXd hg_swap(const Eigen::VectorXd& x, int d) {
  Eigen::VectorXd j(2 * d);
  for (int i = 0; i < d; ++i) {
    j(i) = x(i + d);
    j(i + d) = -x(i);
  }
  return j;
}

void require_positive_gauge(double rho) {
  if (!(rho > 0.0)) {
    throw std::domain_error("closed form undefined at the origin");
  }
}

} // namespace

Eigen::VectorXd gauge_hgrad_closed(const GeometrySpec& g, const Point& p) {
  check_point(g, p);
  switch (g.kind) {
  case GeometryKind::Heisenberg:
  case GeometryKind::HType7:
  case GeometryKind::FreeStep2: {
    const Step2Parts s = step2_parts(g, p);
    require_positive_gauge(s.rho);
    return s.mu / (s.rho * s.rho * s.rho);
  }
  case GeometryKind::Grushin: {
    const double rho = gauge(g, p);
    require_positive_gauge(rho);
    if (g.is_grushin_plane()) {
      const double x = p(0);
      const double y = p(1);
      return Eigen::Vector2d(x * x * x, 2.0 * x * y) / (rho * rho * rho);
    }
    const Eigen::VectorXd x = p.head(g.n);
    const Eigen::VectorXd y = p.tail(g.k);
    const double nx2 = x.squaredNorm();
    const double denom = std::pow(rho, 2.0 * g.gamma + 1.0);
    Eigen::VectorXd out(g.n + g.k);
    out.head(g.n) = std::pow(nx2, g.gamma) * x / denom;
    out.tail(g.k) = (1.0 + g.gamma) * std::pow(nx2, 0.5 * g.gamma) * y / denom;
    return out;
  }
  case GeometryKind::HeisenbergGreiner: {
    const int d = g.d;
    const int dl = g.delta;
    const Eigen::VectorXd x = p.head(2 * d);
    const double t = p(2 * d);
    const double r2 = x.squaredNorm();
    const double N = gauge(g, p);
    require_positive_gauge(N);
    const double a = std::pow(r2, 2.0 * dl - 1.0);
    const double b = std::pow(r2, dl - 1.0) * t;
    const Eigen::VectorXd eta = a * x + b * hg_swap(x, d);
    return eta / std::pow(N, 4.0 * dl - 1.0);
  }
  }
  return {};
}

Eigen::MatrixXd gauge_hhess_closed(const GeometrySpec& g, const Point& p) {
  check_point(g, p);
  const Eigen::VectorXd dr = gauge_hgrad_closed(g, p);
  const Eigen::MatrixXd outer = dr * dr.transpose();
  switch (g.kind) {
  case GeometryKind::Heisenberg:
  case GeometryKind::HType7:
  case GeometryKind::FreeStep2: {
    const Step2Parts s = step2_parts(g, p);
    const int m = g.rank();
    Eigen::MatrixXd A = s.x.squaredNorm() * Eigen::MatrixXd::Identity(m, m) + 2.0 * s.x * s.x.transpose();
    for (const auto& B : s.mats) {
      const Eigen::VectorXd bx = B * s.x;
      A += 2.0 * bx * bx.transpose();
    }
    return A / (s.rho * s.rho * s.rho) - (3.0 / s.rho) * outer;
  }
  case GeometryKind::Grushin: {
    const double rho = gauge(g, p);
    if (g.is_grushin_plane()) {
      const double x = p(0);
      const double y = p(1);
      Eigen::Matrix2d A;
      A << 3.0 * x * x, y, y, 2.0 * x * x;
      return A / (rho * rho * rho) - (3.0 / rho) * outer;
    }
    const int n = g.n;
    const int k = g.k;
    const double gm = g.gamma;
    const Eigen::VectorXd x = p.head(n);
    const Eigen::VectorXd y = p.tail(k);
    const double nx2 = x.squaredNorm();
    const double nx = std::sqrt(nx2);
    const double denom = std::pow(rho, 2.0 * gm + 1.0);
    const double A = std::pow(nx2, gm) / denom;
    Eigen::MatrixXd H = A * Eigen::MatrixXd::Identity(n + k, n + k);
    H.topLeftCorner(n, n) += 2.0 * gm * A * (x / nx) * (x / nx).transpose();
    H.bottomRightCorner(k, k) += gm * A * Eigen::MatrixXd::Identity(k, k);
    const double cross = 0.5 * gm * (1.0 + gm) * std::pow(nx, gm - 2.0) / denom;
    H.topRightCorner(n, k) += cross * x * y.transpose();
    H.bottomLeftCorner(k, n) += cross * y * x.transpose();
    return H - ((2.0 * gm + 1.0) / rho) * outer;
  }
  case GeometryKind::HeisenbergGreiner: {
    const int d = g.d;
    const double dl = g.delta;
    const Eigen::VectorXd x = p.head(2 * d);
    const double t = p(2 * d);
    const double r2 = x.squaredNorm();
    const double N = gauge(g, p);
    const Eigen::VectorXd jx = hg_swap(x, d);
    Eigen::MatrixXd H = std::pow(r2, 2.0 * dl - 1.0) * Eigen::MatrixXd::Identity(2 * d, 2 * d) +
                        (4.0 * dl - 2.0) * std::pow(r2, 2.0 * dl - 2.0) * x * x.transpose() +
                        2.0 * dl * std::pow(r2, 2.0 * dl - 2.0) * jx * jx.transpose();
    if (g.delta > 1) {
      H += (dl - 1.0) * t * std::pow(r2, dl - 2.0) * (x * jx.transpose() + jx * x.transpose());
    }
    return H / std::pow(N, 4.0 * dl - 1.0) - ((4.0 * dl - 1.0) / N) * outer;
  }
  }
  return {};
}

double gauge_hgrad_norm_sq_closed(const GeometrySpec& g, const Point& p) {
  check_point(g, p);
  const double rho = gauge(g, p);
  require_positive_gauge(rho);
  switch (g.kind) {
  case GeometryKind::Heisenberg:
  case GeometryKind::HType7:
    return p.head(g.rank()).squaredNorm() / (rho * rho);
  case GeometryKind::FreeStep2: {
    const Step2Parts s = step2_parts(g, p);
    return s.mu.squaredNorm() / std::pow(rho, 6.0);
  }
  case GeometryKind::Grushin:
    if (g.is_grushin_plane()) {
      return p(0) * p(0) / (rho * rho);
    }
    return std::pow(p.head(g.n).squaredNorm(), g.gamma) / std::pow(rho, 2.0 * g.gamma);
  case GeometryKind::HeisenbergGreiner: {
    const double e = 2.0 * g.delta - 1.0;
    return std::pow(p.head(2 * g.d).squaredNorm(), e) / std::pow(rho, 2.0 * e);
  }
  }
  return 0.0;
}

std::string gauge_quantity_name(const GeometrySpec& g) {
  switch (g.kind) {
  case GeometryKind::Heisenberg:
  case GeometryKind::HType7:
  case GeometryKind::FreeStep2:
    return "mu";
  case GeometryKind::Grushin:
    return g.is_grushin_plane() ? "eta_tilde" : "q";
  case GeometryKind::HeisenbergGreiner:
    return "eta";
  }
  return "";
}

Eigen::VectorXd gauge_quantity(const GeometrySpec& g, const Point& p) {
  check_point(g, p);
  switch (g.kind) {
  case GeometryKind::Heisenberg:
  case GeometryKind::HType7:
  case GeometryKind::FreeStep2:
    return step2_parts(g, p).mu;
  case GeometryKind::Grushin: {
    if (g.is_grushin_plane()) {
      return Eigen::Vector2d(p(0) * p(0) * p(0), 2.0 * p(0) * p(1));
    }
    const Eigen::VectorXd x = p.head(g.n);
    const double nx = x.norm();
    Eigen::VectorXd q(g.n + g.k);
    q.head(g.n) = x;
    q.tail(g.k) = (1.0 + g.gamma) * p.tail(g.k) / std::pow(nx, g.gamma);
    return q;
  }
  case GeometryKind::HeisenbergGreiner: {
    const Eigen::VectorXd x = p.head(2 * g.d);
    const double r2 = x.squaredNorm();
    return std::pow(r2, 2.0 * g.delta - 1.0) * x + std::pow(r2, g.delta - 1.0) * p(2 * g.d) * hg_swap(x, g.d);
  }
  }
  return {};
}

HorizontalJet radial_horizontal_hessian(const GeometrySpec& g, const RadialProfile& prof, const Point& p) {
  const double rho = gauge(g, p);
  require_positive_gauge(rho);
  const Eigen::VectorXd dr = gauge_hgrad_closed(g, p);
  const Eigen::MatrixXd h = gauge_hhess_closed(g, p);
  const double f1 = prof.df(rho);
  const double f2 = prof.d2f(rho);
  HorizontalJet out;
  out.value = prof.f(rho);
  out.hgrad = f1 * dr;
  out.hhess = symmetrize(f1 * h + f2 * dr * dr.transpose());
  out.grad = f1 * gauge_jet(g, p).grad();
  return out;
}

double sublaplacian_radial(const GeometrySpec& g, const RadialProfile& prof, const Point& p) {
  const double rho = gauge(g, p);
  require_positive_gauge(rho);
  const double f1 = prof.df(rho);
  const double f2 = prof.d2f(rho);
  const double grad2 = gauge_hgrad_norm_sq_closed(g, p);
  if (g.kind == GeometryKind::FreeStep2) {
    const double x2 = p.head(g.r).squaredNorm();
    return f1 * 3.0 * g.r * x2 / (rho * rho * rho) + (f2 - 3.0 * f1 / rho) * grad2;
  }
  return grad2 * (f2 + (g.homogeneous_dim() - 1.0) * f1 / rho);
}

} // namespace subriem
