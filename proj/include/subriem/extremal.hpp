#pragma once

#include "subriem/report.hpp"

#include <Eigen/Dense>

#include <vector>

namespace subriem {

struct Ellipticity {
  double lambda = 1.0;
  double Lambda = 1.0;

  /// Throws std::invalid_argument unless 0 < lambda <= Lambda.
  void validate() const;
};

/// Parameter of the Pucci (1966) operators over A >= lam I, Tr A = 1.
struct Pucci66Param {
  double lam = 0.0;
  int m = 0;

  /// Throws std::invalid_argument unless 0 < lam <= 1/m.
  void validate() const;
};

struct Spectrum {
  std::vector<double> eigenvalues; // ascending
  double residual = 0.0;           // max ||M v - e v|| over computed pairs
};

/// Throws std::invalid_argument if M is not symmetric within 1e-12 ||M||.
void check_symmetric(const Eigen::MatrixXd& M);

/// Ascending eigenvalues; closed form for m <= 2, Eigen's self-adjoint solver otherwise.
Spectrum spectrum(const Eigen::MatrixXd& M);

/// Closed-form spectrum of s I + a v v^T + b w w^T + c (v w^T + w v^T) for unit v, w.
Spectrum rank2_eigenvalues(double s, double a, double b, double c, const Eigen::VectorXd& v, const Eigen::VectorXd& w);

/// The matrix whose spectrum rank2_eigenvalues returns.
Eigen::MatrixXd rank2_matrix(double s, double a, double b, double c, const Eigen::VectorXd& v, const Eigen::VectorXd& w);

/// Eigenvalues with |e| <= 1e-12 max|e| count as zero in the sign split.
double zero_band(const Spectrum& s);

double pucci_plus(const Ellipticity& ell, const Spectrum& s);
double pucci_minus(const Ellipticity& ell, const Spectrum& s);
double pucci_plus(const Ellipticity& ell, const Eigen::MatrixXd& M);
double pucci_minus(const Ellipticity& ell, const Eigen::MatrixXd& M);

double pucci66_plus(const Pucci66Param& p, const Spectrum& s);
double pucci66_minus(const Pucci66Param& p, const Spectrum& s);
double pucci66_plus(const Pucci66Param& p, const Eigen::MatrixXd& M);
double pucci66_minus(const Pucci66Param& p, const Eigen::MatrixXd& M);

class Expr;
struct GeometrySpec;
struct SamplePlan;

/// Samples (x, r, p, M, N) and checks M-(M-N) <= G(M) - G(N) <= M+(M-N).
CheckReport subellipticity_probe(const Expr& G, const Ellipticity& ell, const SamplePlan& plan);

} // namespace subriem
