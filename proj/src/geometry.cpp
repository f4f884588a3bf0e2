#include "subriem/geometry.hpp"

#include <cmath>
#include <sstream>

namespace subriem {

namespace {

bool is_even_integer(double v) { return v == std::floor(v) && static_cast<long>(v) % 2 == 0; }

// |x|^gamma from the squared norm, kept polynomial for even integer gamma.
template <class T>
T norm_power(const T& norm_sq, double gamma) {
  if (is_even_integer(gamma)) {
    return ipow_generic(norm_sq, static_cast<int>(gamma / 2.0));
  }
  using std::pow;
  return pow(norm_sq, gamma / 2.0);
}

template <class T>
T zero_like(const T& x) {
  return x * 0.0;
}

template <class T>
T sum_squares(const std::vector<T>& x, int begin, int end) {
  T s = zero_like(x[0]);
  for (int i = begin; i < end; ++i) {
    s = s + x[i] * x[i];
  }
  return s;
}

Eigen::MatrixXd htype_matrix(int s) {
  Eigen::MatrixXd b(4, 4);
  switch (s) {
  case 0:
    b << 0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0;
    break;
  case 1:
    b << 0, 0, 1, 0, 0, 0, 0, -1, -1, 0, 0, 0, 0, 1, 0, 0;
    break;
  default:
    b << 0, 0, 0, 1, 0, 0, 1, 0, 0, -1, 0, 0, -1, 0, 0, 0;
    break;
  }
  return b;
}

std::vector<Taylor2> seeded(const Point& p) {
  const int n = static_cast<int>(p.size());
  std::vector<Taylor2> x;
  x.reserve(n);
  for (int i = 0; i < n; ++i) {
    x.push_back(Taylor2::variable(p(i), n, i));
  }
  return x;
}

std::vector<double> to_vector(const Point& p) { return std::vector<double>(p.data(), p.data() + p.size()); }

} // namespace

GeometrySpec GeometrySpec::heisenberg(int d) {
  if (d < 1) {
    throw std::invalid_argument("Heisenberg: d must be >= 1");
  }
  GeometrySpec g;
  g.kind = GeometryKind::Heisenberg;
  g.d = d;
  return g;
}

GeometrySpec GeometrySpec::htype7() {
  GeometrySpec g;
  g.kind = GeometryKind::HType7;
  return g;
}

GeometrySpec GeometrySpec::free_step2(int r) {
  if (r < 2) {
    throw std::invalid_argument("FreeStep2: r must be >= 2");
  }
  GeometrySpec g;
  g.kind = GeometryKind::FreeStep2;
  g.r = r;
  return g;
}

GeometrySpec GeometrySpec::grushin(int n, int k, double gamma) {
  if (n < 1 || k < 1) {
    throw std::invalid_argument("Grushin: n and k must be >= 1");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("Grushin: gamma must be a positive real");
  }
  GeometrySpec g;
  g.kind = GeometryKind::Grushin;
  g.n = n;
  g.k = k;
  g.gamma = gamma;
  return g;
}

GeometrySpec GeometrySpec::heisenberg_greiner(int d, int delta) {
  if (d < 1) {
    throw std::invalid_argument("HeisenbergGreiner: d must be >= 1");
  }
  if (delta < 1) {
    throw std::invalid_argument("HeisenbergGreiner: delta must be an integer >= 1");
  }
  GeometrySpec g;
  g.kind = GeometryKind::HeisenbergGreiner;
  g.d = d;
  g.delta = delta;
  return g;
}

int GeometrySpec::ambient_dim() const {
  switch (kind) {
  case GeometryKind::Heisenberg:
  case GeometryKind::HeisenbergGreiner:
    return 2 * d + 1;
  case GeometryKind::HType7:
    return 7;
  case GeometryKind::FreeStep2:
    return r + r * (r - 1) / 2;
  case GeometryKind::Grushin:
    return n + k;
  }
  return 0;
}

int GeometrySpec::rank() const {
  switch (kind) {
  case GeometryKind::Heisenberg:
  case GeometryKind::HeisenbergGreiner:
    return 2 * d;
  case GeometryKind::HType7:
    return 4;
  case GeometryKind::FreeStep2:
    return r;
  case GeometryKind::Grushin:
    return n + k;
  }
  return 0;
}

double GeometrySpec::homogeneous_dim() const {
  switch (kind) {
  case GeometryKind::Heisenberg:
    return 2.0 * d + 2.0;
  case GeometryKind::HType7:
    return 10.0;
  case GeometryKind::FreeStep2:
    return r + 2.0 * (r * (r - 1) / 2);
  case GeometryKind::Grushin:
    return n + (1.0 + gamma) * k;
  case GeometryKind::HeisenbergGreiner:
    return 2.0 * d + 2.0 * delta;
  }
  return 0.0;
}

int GeometrySpec::horizontal_dim() const {
  switch (kind) {
  case GeometryKind::Grushin:
    return n;
  default:
    return rank();
  }
}

bool GeometrySpec::is_step2_group() const {
  return kind == GeometryKind::Heisenberg || kind == GeometryKind::HType7 || kind == GeometryKind::FreeStep2;
}

bool GeometrySpec::is_grushin_plane() const {
  return kind == GeometryKind::Grushin && n == 1 && k == 1 && gamma == 1.0;
}

std::string GeometrySpec::name() const {
  std::ostringstream os;
  switch (kind) {
  case GeometryKind::Heisenberg:
    os << "Heisenberg(" << d << ")";
    break;
  case GeometryKind::HType7:
    os << "HType7";
    break;
  case GeometryKind::FreeStep2:
    os << "FreeStep2(" << r << ")";
    break;
  case GeometryKind::Grushin:
    os << "Grushin(" << n << "," << k << "," << gamma << ")";
    break;
  case GeometryKind::HeisenbergGreiner:
    os << "HeisenbergGreiner(" << d << "," << delta << ")";
    break;
  }
  return os.str();
}

std::string GeometrySpec::singular_set() const {
  switch (kind) {
  case GeometryKind::Heisenberg:
  case GeometryKind::FreeStep2:
    return "{0}";
  case GeometryKind::HType7:
  case GeometryKind::HeisenbergGreiner:
    return "{x_H=0}";
  case GeometryKind::Grushin:
    return "{x=0}";
  }
  return "";
}

void check_point(const GeometrySpec& g, const Point& p) {
  if (p.size() != g.ambient_dim()) {
    std::ostringstream os;
    os << g.name() << ": point has " << p.size() << " coordinates, expected " << g.ambient_dim();
    throw DimensionError(os.str());
  }
  if (!p.allFinite()) {
    throw DimensionError(g.name() + ": point has non-finite coordinates");
  }
}

Eigen::VectorXd horizontal_part(const GeometrySpec& g, const Point& p) {
  check_point(g, p);
  return p.head(g.horizontal_dim());
}

Eigen::VectorXd vertical_part(const GeometrySpec& g, const Point& p) {
  check_point(g, p);
  return p.tail(g.ambient_dim() - g.horizontal_dim());
}

std::vector<Eigen::MatrixXd> step2_matrices(const GeometrySpec& g) {
  std::vector<Eigen::MatrixXd> out;
  switch (g.kind) {
  case GeometryKind::Heisenberg: {
    const int m = 2 * g.d;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
    b.topRightCorner(g.d, g.d) = Eigen::MatrixXd::Identity(g.d, g.d);
    b.bottomLeftCorner(g.d, g.d) = -Eigen::MatrixXd::Identity(g.d, g.d);
    out.push_back(b);
    break;
  }
  case GeometryKind::HType7:
    for (int s = 0; s < 3; ++s) {
      out.push_back(htype_matrix(s));
    }
    break;
  case GeometryKind::FreeStep2:
    // Pair (a, b), a > b, row-major: (B x) = x_a e_b - x_b e_a.
    for (int a = 1; a < g.r; ++a) {
      for (int b = 0; b < a; ++b) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(g.r, g.r);
        m(b, a) = 1.0;
        m(a, b) = -1.0;
        out.push_back(m);
      }
    }
    break;
  default:
    throw std::invalid_argument(g.name() + " is not a step-2 Carnot group");
  }
  return out;
}

template <class T>
std::vector<std::vector<T>> sigma_of(const GeometrySpec& g, const std::vector<T>& x) {
  const int dim = g.ambient_dim();
  const int m = g.rank();
  const T zero = zero_like(x[0]);
  std::vector<std::vector<T>> cols(m, std::vector<T>(dim, zero));
  switch (g.kind) {
  case GeometryKind::Heisenberg:
  case GeometryKind::HType7:
  case GeometryKind::FreeStep2: {
    const auto mats = step2_matrices(g);
    for (int j = 0; j < m; ++j) {
      cols[j][j] = zero + 1.0;
      for (std::size_t s = 0; s < mats.size(); ++s) {
        T bx = zero;
        for (int l = 0; l < m; ++l) {
          const double c = mats[s](j, l);
          if (c != 0.0) {
            bx = bx + c * x[l];
          }
        }
        cols[j][m + static_cast<int>(s)] = 2.0 * bx;
      }
    }
    break;
  }
  case GeometryKind::Grushin: {
    T weight = g.is_grushin_plane() ? x[0] : norm_power(sum_squares(x, 0, g.n), g.gamma);
    for (int i = 0; i < g.n; ++i) {
      cols[i][i] = zero + 1.0;
    }
    for (int j = 0; j < g.k; ++j) {
      cols[g.n + j][g.n + j] = weight;
    }
    break;
  }
  case GeometryKind::HeisenbergGreiner: {
    const int hd = g.d;
    const T r2 = sum_squares(x, 0, 2 * hd);
    const T rpow = ipow_generic(r2, g.delta - 1);
    const double c = 2.0 * g.delta;
    for (int i = 0; i < hd; ++i) {
      cols[i][i] = zero + 1.0;
      cols[i][2 * hd] = c * x[i + hd] * rpow;
      cols[i + hd][i + hd] = zero + 1.0;
      cols[i + hd][2 * hd] = -c * x[i] * rpow;
    }
    break;
  }
  }
  return cols;
}

template <class T>
T gauge_of(const GeometrySpec& g, const std::vector<T>& x) {
  using std::pow;
  switch (g.kind) {
  case GeometryKind::Heisenberg:
  case GeometryKind::HType7:
  case GeometryKind::FreeStep2: {
    const int m = g.rank();
    const T h2 = sum_squares(x, 0, m);
    const T v2 = sum_squares(x, m, g.ambient_dim());
    return pow(h2 * h2 + v2, 0.25);
  }
  case GeometryKind::Grushin: {
    const T h2 = sum_squares(x, 0, g.n);
    const T v2 = sum_squares(x, g.n, g.ambient_dim());
    const double a = 1.0 + g.gamma;
    return pow(norm_power(h2, 2.0 * a) + (a * a) * v2, 1.0 / (2.0 * a));
  }
  case GeometryKind::HeisenbergGreiner: {
    const T r2 = sum_squares(x, 0, 2 * g.d);
    const T t = x[2 * g.d];
    return pow(ipow_generic(r2, 2 * g.delta) + t * t, 1.0 / (4.0 * g.delta));
  }
  }
  return x[0];
}

template std::vector<std::vector<double>> sigma_of(const GeometrySpec&, const std::vector<double>&);
template std::vector<std::vector<Taylor2>> sigma_of(const GeometrySpec&, const std::vector<Taylor2>&);
template double gauge_of(const GeometrySpec&, const std::vector<double>&);
template Taylor2 gauge_of(const GeometrySpec&, const std::vector<Taylor2>&);

Eigen::MatrixXd sigma(const GeometrySpec& g, const Point& p) {
  check_point(g, p);
  const auto cols = sigma_of(g, to_vector(p));
  Eigen::MatrixXd s(g.ambient_dim(), g.rank());
  for (int j = 0; j < g.rank(); ++j) {
    for (int i = 0; i < g.ambient_dim(); ++i) {
      s(i, j) = cols[j][i];
    }
  }
  return s;
}

double gauge(const GeometrySpec& g, const Point& p) {
  check_point(g, p);
  return gauge_of(g, to_vector(p));
}

Taylor2 gauge_jet(const GeometrySpec& g, const Point& p) {
  check_point(g, p);
  return gauge_of(g, seeded(p));
}

Eigen::VectorXd dilation_weights(const GeometrySpec& g) {
  Eigen::VectorXd w = Eigen::VectorXd::Ones(g.ambient_dim());
  double vertical = 2.0;
  if (g.kind == GeometryKind::Grushin) {
    vertical = 1.0 + g.gamma;
  } else if (g.kind == GeometryKind::HeisenbergGreiner) {
    vertical = 2.0 * g.delta;
  }
  w.tail(g.ambient_dim() - g.horizontal_dim()).setConstant(vertical);
  return w;
}

Point dilate(const GeometrySpec& g, double lambda, const Point& p) {
  check_point(g, p);
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("dilate: lambda must be positive");
  }
  const Eigen::VectorXd w = dilation_weights(g);
  Point out(p.size());
  for (int i = 0; i < p.size(); ++i) {
    out(i) = (w(i) == 1.0 ? lambda : std::pow(lambda, w(i))) * p(i);
  }
  return out;
}

std::vector<Eigen::MatrixXd> sigma_jacobians(const GeometrySpec& g, const Point& p) {
  check_point(g, p);
  const auto cols = sigma_of(g, seeded(p));
  const int dim = g.ambient_dim();
  std::vector<Eigen::MatrixXd> out;
  out.reserve(cols.size());
  for (const auto& col : cols) {
    Eigen::MatrixXd j(dim, dim);
    for (int i = 0; i < dim; ++i) {
      j.row(i) = col[i].grad().transpose();
    }
    out.push_back(std::move(j));
  }
  return out;
}

Eigen::VectorXd lie_bracket(const GeometrySpec& g, int i, int j, const Point& p) {
  if (i < 0 || j < 0 || i >= g.rank() || j >= g.rank()) {
    throw DimensionError("lie_bracket: field index out of range");
  }
  const auto jac = sigma_jacobians(g, p);
  const Eigen::MatrixXd s = sigma(g, p);
  return jac[j] * s.col(i) - jac[i] * s.col(j);
}

HormanderRank hormander_rank(const GeometrySpec& g, const Point& p) {
  const int m = g.rank();
  const int dim = g.ambient_dim();
  const Eigen::MatrixXd s = sigma(g, p);
  const auto jac = sigma_jacobians(g, p);
  Eigen::MatrixXd span(dim, m + m * (m - 1) / 2);
  span.leftCols(m) = s;
  int col = m;
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      span.col(col++) = jac[j] * s.col(i) - jac[i] * s.col(j);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(span);
  const auto& sv = svd.singularValues();
  const double tol = 1e-10 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) {
      ++rank;
    }
  }
  return {rank, rank < dim};
}

Point project_to_unit_gauge(const GeometrySpec& g, const Point& p) {
  const double rho = gauge(g, p);
  if (!(rho > 0.0)) {
    throw std::invalid_argument("project_to_unit_gauge: point is the origin");
  }
  return dilate(g, 1.0 / rho, p);
}

bool near_singular(const GeometrySpec& g, const Point& p, const SingularSet& s) {
  const double rho = gauge(g, p);
  if (!(rho > 0.0)) {
    return true;
  }
  const Point unit = dilate(g, 1.0 / rho, p);
  switch (g.kind) {
  case GeometryKind::HType7:
  case GeometryKind::HeisenbergGreiner:
  case GeometryKind::Grushin:
    return unit.head(g.horizontal_dim()).norm() < s.eps;
  default:
    return false;
  }
}

} // namespace subriem
