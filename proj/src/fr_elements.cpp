#include "fribm/fr_elements.hpp"

#include <cmath>
#include <string>

namespace fribm {

void FRConfig::validate() const {
  if (P < 0) throw config_error("P must be >= 0, got " + std::to_string(P));
  if (P > kMaxOrder)
    throw config_error("P = " + std::to_string(P) + " exceeds the supported range [0, " +
                       std::to_string(kMaxOrder) + "]");
  if (lambda_upwind < 0.0 || lambda_upwind > 1.0)
    throw config_error("lambda must lie in [0, 1], got " + std::to_string(lambda_upwind));
}

double legendre(int n, double x) {
  if (n == 0) return 1.0;
  double pm1 = 1.0, p = x;
  for (int j = 1; j < n; ++j) {
    double pn = ((2.0 * j + 1.0) * x * p - j * pm1) / (j + 1.0);
    pm1 = p;
    p = pn;
  }
  return p;
}

double legendre_derivative(int n, double x) {
  if (n == 0) return 0.0;
  // (1 - x^2) L_n' = n (L_{n-1} - x L_n); endpoints via L_n'(+-1).
  if (std::abs(1.0 - x * x) < 1e-14) {
    double sign = (x > 0.0) ? 1.0 : ((n % 2 == 0) ? -1.0 : 1.0);
    return sign * 0.5 * n * (n + 1.0);
  }
  return n * (legendre(n - 1, x) - x * legendre(n, x)) / (1.0 - x * x);
}

NodeSet gauss_nodes(int P) {
  if (P < 0) throw config_error("gauss_nodes: P must be >= 0");
  if (P > kMaxOrder)
    throw config_error("gauss_nodes: P = " + std::to_string(P) + " exceeds the supported range");
  const int n = P + 1;
  Eigen::VectorXd r(n);

  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess, then Newton on L_{P+1}.
    double x = -std::cos(M_PI * (2.0 * i + 1.0) / (2.0 * n));
    for (int it = 0; it < 100; ++it) {
      double f = legendre(n, x);
      double step = f / legendre_derivative(n, x);
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    r[i] = x;
  }

  // Symmetrize: r_i = -r_{P-i} exactly, and the middle node of an odd
  // count is exactly zero.
  for (int i = 0; i < n / 2; ++i) {
    double m = 0.5 * (r[i] - r[n - 1 - i]);
    r[i] = m;
    r[n - 1 - i] = -m;
  }
  if (n % 2 == 1) r[n / 2] = 0.0;

  for (int i = 0; i + 1 < n; ++i)
    if (!(r[i] < r[i + 1]))
      throw numerical_error("gauss_nodes: nodes failed to come out strictly increasing at P = " +
                            std::to_string(P));

  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) {
    double prod = 1.0;
    for (int j = 0; j < n; ++j)
      if (j != i) prod *= (r[i] - r[j]);
    w[i] = 1.0 / prod;
  }
  return NodeSet{std::move(r), std::move(w)};
}

Eigen::MatrixXd diff_matrix(const NodeSet& nodes) {
  const int n = static_cast<int>(nodes.nodes.size());
  const auto& r = nodes.nodes;
  const auto& w = nodes.barycentric_weights;
  Eigen::MatrixXd D(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      D(i, j) = (w[j] / w[i]) / (r[i] - r[j]);
      diag -= D(i, j);
    }
    D(i, i) = diag;  // rows annihilate constants by construction
  }
  return D;
}

namespace {

Eigen::RowVectorXd barycentric_row(const NodeSet& nodes, double x) {
  const int n = static_cast<int>(nodes.nodes.size());
  Eigen::RowVectorXd row(n);
  double denom = 0.0;
  for (int j = 0; j < n; ++j) {
    row[j] = nodes.barycentric_weights[j] / (x - nodes.nodes[j]);
    denom += row[j];
  }
  return row / denom;
}

}  // namespace

std::pair<Eigen::RowVectorXd, Eigen::RowVectorXd> boundary_interpolation(const NodeSet& nodes) {
  // Gauss nodes are interior, so the barycentric form is safe at +-1.
  return {barycentric_row(nodes, -1.0), barycentric_row(nodes, 1.0)};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> radau_correction_derivatives(int P, const NodeSet& nodes) {
  if (P < 0) throw config_error("radau_correction_derivatives: P must be >= 0");
  const int n = P + 1;
  const double sl = (P % 2 == 0) ? -0.5 : 0.5;  // (-1)^{P+1}/2

  auto gl = [&](double x) { return sl * (legendre(n, x) - legendre(P, x)); };
  auto gr = [&](double x) { return 0.5 * (legendre(n, x) + legendre(P, x)); };
  const double checks[4] = {gl(-1.0) - 1.0, gl(1.0), gr(-1.0), gr(1.0) - 1.0};
  for (double v : checks)
    if (std::abs(v) > 1e-12)
      throw numerical_error("radau correction endpoint condition violated at P = " + std::to_string(P));

  Eigen::VectorXd gl_d(n), gr_d(n);
  for (int i = 0; i < n; ++i) {
    double x = nodes.nodes[i];
    gl_d[i] = sl * (legendre_derivative(n, x) - legendre_derivative(P, x));
    gr_d[i] = 0.5 * (legendre_derivative(n, x) + legendre_derivative(P, x));
  }
  return {std::move(gl_d), std::move(gr_d)};
}

LocalOperators local_operators(const FRConfig& cfg, double h) {
  cfg.validate();
  if (!(h > 0.0)) throw config_error("local_operators: element size h must be > 0");

  LocalOperators ops;
  ops.h = h;
  NodeSet nodes = gauss_nodes(cfg.P);
  ops.D = diff_matrix(nodes);
  std::tie(ops.l_left, ops.l_right) = boundary_interpolation(nodes);
  std::tie(ops.gl_deriv, ops.gr_deriv) = radau_correction_derivatives(cfg.P, nodes);

  const double c = cfg.c;
  const double up = cfg.lambda_upwind * std::abs(c);

  ops.left = -(1.0 / h) * ops.gl_deriv * ((c + up) * ops.l_right);
  ops.middle = -(2.0 / h) * (c * ops.D - 0.5 * ops.gl_deriv * ((c + up) * ops.l_left) +
                             0.5 * ops.gr_deriv * ((up - c) * ops.l_right));
  ops.right = -(1.0 / h) * ops.gr_deriv * ((c - up) * ops.l_left);
  return ops;
}

Eigen::MatrixXcd single_element_symbol(const LocalOperators& ops, double kh) {
  const Complex phase_l = std::exp(Complex(0.0, -kh));
  const Complex phase_r = std::exp(Complex(0.0, kh));
  return phase_l * ops.left.cast<Complex>() + ops.middle.cast<Complex>() +
         phase_r * ops.right.cast<Complex>();
}

}  // namespace fribm
