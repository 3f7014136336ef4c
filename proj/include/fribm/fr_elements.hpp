#pragma once

#include <utility>

#include <Eigen/Dense>

#include "fribm/common.hpp"

namespace fribm {

/// Largest supported polynomial order. Covers all cases of interest
/// (P <= 6); the node solver is validated up to this bound.
inline constexpr int kMaxOrder = 10;

enum class CorrectionFamily { RadauDG };

/// Reference-element configuration for the linear advection flux
/// c*u with a Lax-Friedrichs type interface flux. lambda_upwind = 1 is
/// fully upwind, 0 is central.
struct FRConfig {
  int P = 3;
  double c = 1.0;
  double lambda_upwind = 1.0;
  CorrectionFamily correction_family = CorrectionFamily::RadauDG;

  void validate() const;
};

/// Legendre-Gauss solution points on (-1, 1) with barycentric weights.
struct NodeSet {
  Eigen::VectorXd nodes;
  Eigen::VectorXd barycentric_weights;

  int degree() const { return static_cast<int>(nodes.size()) - 1; }
};

/// Per-element operators of the semi-discrete scheme
///   du_n/dt = left*u_{n-1} + middle*u_n + right*u_{n+1}
/// together with the ingredients they are assembled from.
struct LocalOperators {
  Eigen::MatrixXd D;             // nodal differentiation, reference space
  Eigen::RowVectorXd l_left;     // interpolation to r = -1
  Eigen::RowVectorXd l_right;    // interpolation to r = +1
  Eigen::VectorXd gl_deriv;      // dg^L/dr at the nodes
  Eigen::VectorXd gr_deriv;      // dg^R/dr at the nodes
  Eigen::MatrixXd left, middle, right;
  double h = 0.0;                // element size; Jacobian is h/2
};

/// Legendre polynomial L_n and its derivative, by recurrence.
double legendre(int n, double x);
double legendre_derivative(int n, double x);

/// Legendre-Gauss nodes of the degree-(P+1) polynomial, strictly
/// increasing, plus barycentric weights. Newton iteration seeded with
/// Chebyshev guesses; symmetry is enforced exactly by mirroring.
NodeSet gauss_nodes(int P);

/// D[i][j] = dl_j/dr at r_i via the barycentric differentiation formulas.
Eigen::MatrixXd diff_matrix(const NodeSet& nodes);

/// Rows interpolating nodal values to r = -1 and r = +1.
std::pair<Eigen::RowVectorXd, Eigen::RowVectorXd> boundary_interpolation(const NodeSet& nodes);

/// Nodal derivatives of the Radau correction functions
///   g^L = ((-1)^{P+1}/2) (L_{P+1} - L_P),   g^R = (1/2) (L_{P+1} + L_P),
/// which satisfy g^L(-1)=1, g^L(1)=0, g^R(-1)=0, g^R(1)=1 and
/// g^L(r) = g^R(-r). The endpoint conditions are checked at build time.
std::pair<Eigen::VectorXd, Eigen::VectorXd> radau_correction_derivatives(int P, const NodeSet& nodes);

/// Assembles left/middle/right for element size h. Rejects h <= 0.
LocalOperators local_operators(const FRConfig& cfg, double h);

/// Single-element periodic symbol  left*e^{-i kh} + middle + right*e^{+i kh}.
Eigen::MatrixXcd single_element_symbol(const LocalOperators& ops, double kh);

}  // namespace fribm
