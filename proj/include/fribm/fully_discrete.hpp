#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fribm/common.hpp"
#include "fribm/spectral.hpp"

namespace fribm {

/// RK3 stability polynomial R(z) = 1 + z + z^2/2 + z^3/6.
Complex rk3_gain(Complex z);

/// Fully-discrete operator A = I + dt M + (dt M)^2/2 + (dt M)^3/6.
Eigen::MatrixXcd amplification(const Eigen::MatrixXcd& M, double dt);

/// k* = i ln(lambda) / (c dt), principal branch. A zero eigenvalue is a
/// fully annihilated mode and an explicit error.
Eigen::VectorXcd fd_modified_wavenumbers(const Eigen::VectorXcd& a_eigenvalues, double dt, double c);

/// CFL = c dt (2P+1) / h.
double cfl_number(double c, double dt, int P, double h);
double dt_from_cfl(double cfl, double c, int P, double h);

/// |lambda| <= 1 + 1e-10 counts as stable.
inline constexpr double kStabilityTol = 1e-10;

/// Per-wavenumber fully-discrete diagnostics. solid_mode_dissipation is
/// NaN when the sweep found no solid branch.
struct FDResult {
  double k = 0.0, dt = 0.0, cfl = 0.0;
  Eigen::VectorXcd a_eigenvalues;  // R(dt lambda_M), branch-tracked order
  Eigen::VectorXcd kstar_fd;
  bool stable = false;
  double solid_mode_dissipation = std::numeric_limits<double>::quiet_NaN();
};

/// Fully-discrete primary/solid curves over the k-grid, normalized by
/// h/(P+1). primary_real is reported both wrapped to the principal
/// branch and unwrapped by continuity.
struct FDCurve {
  Eigen::VectorXd kgrid, khat;
  Eigen::VectorXd primary_real, primary_real_unwrapped;
  Eigen::VectorXd primary_imag, corrected_imag;
  double gamma_ibm_fd = 0.0;  // primary dissipation at the smallest k sample
  Eigen::VectorXd solid_imag;  // most unstable solid branch, NaN if absent
  bool solid_present = false;
  bool used_fallback = false;  // solid search fell back to non-primary modes
  double dt = 0.0, cfl = 0.0;
  bool stable = true;
  std::vector<FDResult> per_k;
};

FDCurve sweep_fully_discrete(const FRConfig& cfg, const MeshSpec& mesh, const MaskSpec& mask,
                             const PenalizationSpec& pen, double dt, const Eigen::VectorXd& kgrid,
                             bool shift = false);

/// Largest CFL (bisection to 1e-4 relative) keeping every mode of the
/// r = 0 operator inside |R(dt lambda)| <= 1 + 1e-10 across the grid.
double find_cfl_max(const FRConfig& cfg, const MeshSpec& mesh, const Eigen::VectorXd& kgrid);

struct CriticalEtaResult {
  double eta_unstable = 0.0;  // lower bracket end (positive solid dissipation)
  double eta_stable = 0.0;    // upper bracket end
  double dt = 0.0;
  bool used_fallback = false;
  bool monotone = true;  // single sign change across all evaluations
  std::string diagnostic;
  std::vector<std::pair<double, double>> evaluations;  // (eta, max solid FD dissipation)

  double eta_critical() const { return 0.5 * (eta_unstable + eta_stable); }
};

/// Bisects eta in [0.1 dt, 2 dt] for the sign change of the most
/// unstable solid branch's fully-discrete dissipation. The solid branch
/// is the constancy-labeled one with maximal Imag(k*); if none
/// qualifies, the most dissipative non-primary branch is used and
/// flagged. A bracket without a sign change is an error naming the
/// endpoint dissipation values.
CriticalEtaResult find_critical_eta(const FRConfig& cfg, const MeshSpec& mesh, const MaskSpec& mask,
                                    double dt, const Eigen::VectorXd& kgrid);

}  // namespace fribm
