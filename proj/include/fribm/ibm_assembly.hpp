#pragma once

#include <Eigen/Dense>

#include "fribm/common.hpp"
#include "fribm/fr_elements.hpp"

namespace fribm {

/// Periodic domain [-T, T] split into N equispaced elements.
struct MeshSpec {
  double T = 1.0;
  int N = 1;

  double h() const { return 2.0 * T / N; }
  double jacobian() const { return T / N; }
  void validate() const;
};

/// Solid occupying the Z elements immediately right of x = 0
/// (0 < x < Delta with Delta = Z*h). chi flags the global solution
/// points inside the solid, element-major.
struct MaskSpec {
  int Z = 0;
  double r = 0.0;  // solid ratio Z/N
  Eigen::ArrayXi chi;
};

/// Penalty term (chi/eta)(u - u_s) plus optional second-order damping
/// chi * eta_v * u_xx discretized by LDG with switch beta and interface
/// penalty tau.
struct PenalizationSpec {
  double eta = 1.0;
  double eta_v = 0.0;
  double u_s = 0.0;
  double ldg_beta = 0.5;
  double ldg_tau = 0.1;

  void validate() const;
};

/// BlochPhases carries exp(-+2ikT) ghost factors on the corner blocks
/// (the analysis operator); UnitPhases wraps with factor one (the
/// physically periodic simulation operator, real-valued).
enum class PhaseMode { BlochPhases, UnitPhases };

/// Dense wavenumber-parameterized semi-discrete operator of size N(P+1),
/// with full provenance of the inputs that built it.
struct GlobalOperator {
  double k = 0.0;
  Eigen::MatrixXcd entries;
  PhaseMode phase_mode = PhaseMode::BlochPhases;
  FRConfig cfg;
  MeshSpec mesh;
  MaskSpec mask;
  PenalizationSpec pen;

  int size() const { return static_cast<int>(entries.rows()); }
  /// UnitPhases entries are real; asserts and strips the imaginary part.
  Eigen::MatrixXd real_entries() const;
};

/// Physical coordinates of all N(P+1) solution points, element-major.
Eigen::VectorXd global_points(const MeshSpec& mesh, const NodeSet& nodes);

/// Flags the solution points of the Z elements right of x = 0. Rejects
/// Z < 0 or Z >= N; Z > 0 requires even N so x = 0 is an interface.
MaskSpec build_mask(const MeshSpec& mesh, int Z, const NodeSet& nodes);

/// Global LDG discretization of d2/dx2 with periodic coupling in the
/// given phase mode: an auxiliary-gradient sweep with interface flux
/// u_hat = {u} - beta*[u], then a divergence sweep with
/// q_hat = {q} + beta*[q] - (tau/h)*[u]; jumps oriented left-to-right.
Eigen::MatrixXcd assemble_ldg_second_derivative(const FRConfig& cfg, const MeshSpec& mesh,
                                                PhaseMode phase_mode, double k,
                                                double beta = 0.5, double tau = 0.1);

/// Blocks left/middle/right on the sub/main/super block diagonals, corner
/// blocks per phase_mode, -(1/eta) on the masked diagonal entries, plus
/// eta_v * diag(chi) * D2 when eta_v > 0.
GlobalOperator assemble_semi_discrete(double k, const FRConfig& cfg, const MeshSpec& mesh,
                                      const MaskSpec& mask, const PenalizationSpec& pen,
                                      PhaseMode phase_mode);

/// Solid ratio generalized to 2-D: sqrt(S_solid / S_domain).
double solid_ratio_2d(double S_solid, double S_domain);

}  // namespace fribm
