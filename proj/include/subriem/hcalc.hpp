#pragma once

#include "subriem/expr.hpp"
#include "subriem/geometry.hpp"
#include "subriem/taylor.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace subriem {

/// (D_X u, (D^2_X u)*) at a point.
struct HorizontalJet {
  double value = 0.0;
  Eigen::VectorXd hgrad;
  Eigen::MatrixXd hhess;
  /// Euclidean gradient, kept for Euclidean-drift Hamiltonians.
  Eigen::VectorXd grad;
  bool nonsmooth = false;
};

/// g_ij = ((D sigma^j sigma^i + D sigma^i sigma^j)/2) . q
Eigen::MatrixXd correction(const GeometrySpec& g, const Point& p, const Eigen::VectorXd& q);

/// Horizontal jet from a Euclidean jet of u at p.
HorizontalJet horizontal_jet(const GeometrySpec& g, const Taylor2& u, const Point& p);
HorizontalJet horizontal_jet(const GeometrySpec& g, const Expr& u, const Point& p);

using NativeFunction = std::function<Taylor2(const std::vector<Taylor2>&)>;
HorizontalJet horizontal_jet(const GeometrySpec& g, const NativeFunction& u, const Point& p);

/// A one-dimensional profile f(rho) with its first two derivatives.
struct RadialProfile {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;

  Taylor2 compose(const Taylor2& rho) const { return rho.compose(f(rho.value()), df(rho.value()), d2f(rho.value())); }
};

RadialProfile profile_identity();
RadialProfile profile_log();
/// rho^e
RadialProfile profile_power(double e);
/// (1 + rho^2)^a
RadialProfile profile_shifted_power(double a);
RadialProfile profile_constant(double c);
/// Profile backed by a parsed radial expression; derivatives come from Taylor evaluation.
RadialProfile profile_from_expr(const Expr& e);

/// Largest |f' - FD| and |f'' - FD| (relative) over the grid, central differences with step h.
double profile_consistency_error(const RadialProfile& prof, const std::vector<double>& grid, double h = 1e-4);

/// Closed-form horizontal gradient of the gauge.
Eigen::VectorXd gauge_hgrad_closed(const GeometrySpec& g, const Point& p);

/// Closed-form (D^2_X rho)*.
Eigen::MatrixXd gauge_hhess_closed(const GeometrySpec& g, const Point& p);

/// Closed-form |D_X rho|^2.
double gauge_hgrad_norm_sq_closed(const GeometrySpec& g, const Point& p);

/// The geometry's named auxiliary vector: mu (step-2), eta-tilde (Grushin plane),
/// q (Grushin), eta (Heisenberg-Greiner).
Eigen::VectorXd gauge_quantity(const GeometrySpec& g, const Point& p);
std::string gauge_quantity_name(const GeometrySpec& g);

/// Closed-form jet of f(rho): hgrad = f' D_X rho, hhess = f' (D^2_X rho)* + f'' D_X rho (x) D_X rho.
HorizontalJet radial_horizontal_hessian(const GeometrySpec& g, const RadialProfile& prof, const Point& p);

/// Closed-form Delta_X f(rho).
double sublaplacian_radial(const GeometrySpec& g, const RadialProfile& prof, const Point& p);

/// (A + A^T)/2
Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& A);

} // namespace subriem
