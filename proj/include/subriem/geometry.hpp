#pragma once

#include "subriem/taylor.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace subriem {

/// Thrown when a point or argument does not match the geometry it is used with.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class GeometryKind { Heisenberg, HType7, FreeStep2, Grushin, HeisenbergGreiner };

using Point = Eigen::VectorXd;

/// One of the five vector-field families with its parameters.
///
/// Coordinates are (x_H, x_V): the horizontal layer first, then the vertical
/// one. Free-group vertical coordinates t_{kj}, k > j, are stored row-major
/// over pairs: t_21, t_31, t_32, t_41, ...
///
/// HType7 uses the rescaled vertical layer t' = t/4 so that rho^{2-Q} is the
/// fundamental solution of its sub-Laplacian with the fields
/// X_j = d_j + 2 sum_s (B_s x)_j d_{t_s}.
///
/// Grushin(1,1,1) is the prototype plane X = d_x, Y = x d_y (signed x); every
/// other Grushin parameter set uses Y_j = |x|^gamma d_{y_j}.
struct GeometrySpec {
  GeometryKind kind = GeometryKind::Heisenberg;
  int d = 1;          // Heisenberg and Heisenberg-Greiner: x_H in R^{2d}
  int r = 2;          // free group generators
  int n = 1;          // Grushin: x in R^n
  int k = 1;          // Grushin: y in R^k
  double gamma = 1.0; // Grushin exponent
  int delta = 1;      // Heisenberg-Greiner exponent

  static GeometrySpec heisenberg(int d);
  static GeometrySpec htype7();
  static GeometrySpec free_step2(int r);
  static GeometrySpec grushin(int n, int k, double gamma);
  static GeometrySpec grushin_plane() { return grushin(1, 1, 1.0); }
  static GeometrySpec heisenberg_greiner(int d, int delta);

  int ambient_dim() const;
  /// Number of generating fields m.
  int rank() const;
  double homogeneous_dim() const;
  /// Length of the x_H block.
  int horizontal_dim() const;
  bool is_step2_group() const;
  bool is_grushin_plane() const;
  std::string name() const;
  /// Human-readable description of where the formulas degenerate.
  std::string singular_set() const;
};

/// Points within `eps` (on the unit gauge sphere) of the degenerate set are rejected by samplers.
struct SingularSet {
  double eps = 1e-3;
};

void check_point(const GeometrySpec& g, const Point& p);

Eigen::VectorXd horizontal_part(const GeometrySpec& g, const Point& p);
Eigen::VectorXd vertical_part(const GeometrySpec& g, const Point& p);

/// Skew matrices B_s defining a step-2 group law (Heisenberg, HType7, FreeStep2).
std::vector<Eigen::MatrixXd> step2_matrices(const GeometrySpec& g);

/// Columns of sigma as generic-scalar vectors; sigma_of(g, x)[j][i] is the i-th entry of X_j.
template <class T>
std::vector<std::vector<T>> sigma_of(const GeometrySpec& g, const std::vector<T>& x);

template <class T>
T gauge_of(const GeometrySpec& g, const std::vector<T>& x);

/// The d_amb x m matrix whose columns are the coefficient vectors of X_j at p.
Eigen::MatrixXd sigma(const GeometrySpec& g, const Point& p);

double gauge(const GeometrySpec& g, const Point& p);

/// Taylor jet of the gauge at p (exact Euclidean gradient and Hessian).
Taylor2 gauge_jet(const GeometrySpec& g, const Point& p);

/// Dilation exponents per coordinate: dilate(l, p)_i = l^{w_i} p_i.
Eigen::VectorXd dilation_weights(const GeometrySpec& g);

Point dilate(const GeometrySpec& g, double lambda, const Point& p);

/// Coefficient vector of [X_i, X_j] at p, i.e. D sigma^j sigma^i - D sigma^i sigma^j.
Eigen::VectorXd lie_bracket(const GeometrySpec& g, int i, int j, const Point& p);

/// Jacobians of the sigma columns: result[j] is D sigma^j (d_amb x d_amb).
std::vector<Eigen::MatrixXd> sigma_jacobians(const GeometrySpec& g, const Point& p);

struct HormanderRank {
  int rank = 0;
  /// Set when fields plus first brackets do not span the ambient space at p.
  bool needs_higher_brackets = false;
};

HormanderRank hormander_rank(const GeometrySpec& g, const Point& p);

/// Dilates p onto the unit gauge sphere; p must not be the origin.
Point project_to_unit_gauge(const GeometrySpec& g, const Point& p);

/// True when the unit-sphere representative of p lies within eps of the degenerate set.
bool near_singular(const GeometrySpec& g, const Point& p, const SingularSet& s);

} // namespace subriem
