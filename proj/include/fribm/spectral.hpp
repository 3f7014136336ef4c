#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fribm/common.hpp"
#include "fribm/ibm_assembly.hpp"

namespace fribm {

enum class ModeLabel { Primary, Secondary, Solid };

const char* to_string(ModeLabel label);

struct EigResult {
  Eigen::VectorXcd values;   // sorted by (Real desc, Imag desc)
  Eigen::MatrixXcd vectors;  // unit columns, largest entry rotated to the positive real axis
};

/// Full dense eigendecomposition (Schur-based). Every pair satisfies
/// ||A v - lambda v|| <= 1e-9 * ||A||_F, else this throws naming the
/// size and the worst residual. Deterministic on a given platform.
EigResult eig_dense(const Eigen::MatrixXcd& A);

/// Real(k*) = -Imag(lambda)/c, Imag(k*) = Real(lambda)/c.
Eigen::VectorXcd modified_wavenumbers(const Eigen::VectorXcd& eigenvalues, double c);

/// khat = k / (1 - r).
double rescale_wavenumber(double k, double r);

/// Eigenpairs of M(k) with per-mode modified wavenumbers. labels is
/// filled by classify_modes.
struct ModeSet {
  double k = 0.0;  // wavenumber the operator was assembled at
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
  Eigen::VectorXcd kstar;
  std::vector<ModeLabel> labels;
};

ModeSet mode_set(const GlobalOperator& op);

/// Branch-tracked eigenvalue table over the k-grid. Branch b of row j is
/// mode mode_index(j, b) of the j-th ModeSet.
struct TrackedModes {
  Eigen::MatrixXcd lambda;  // n_k x n_branches
  Eigen::MatrixXcd kstar;   // n_k x n_branches
  Eigen::MatrixXi mode_index;
  std::vector<ModeLabel> labels;  // per branch
  int primary = -1;
  std::vector<int> solid_branches;
};

/// Tracks branches across k by maximal eigenvector overlap; ties within
/// 1e-6 are broken by the smallest eigenvalue jump.
TrackedModes track_modes(const std::vector<ModeSet>& sets);

/// Labels Solid the branches whose eigenvalue spread across the whole
/// grid stays below 1e-6/eta. Only a penalized operator can have them.
void label_solid_branches(TrackedModes& tracked, double r, double eta);

/// Picks the Primary as the non-Solid branch with Real(k*)/khat_min
/// closest to 1 at the smallest k sample. Two candidates within 1e-3 of
/// each other is an explicit error listing both.
void select_primary(TrackedModes& tracked, double khat_min);

/// track + solid labels + primary selection, then writes per-k labels
/// back into the ModeSets. k_shift is added to the smallest grid
/// wavenumber before rescaling when identifying the primary (the pi/N
/// shift; strongly penalized cases place the physical branch there).
TrackedModes classify_modes(std::vector<ModeSet>& sets, double r, double eta, double k_shift = 0.0);

/// gamma_IBM = Imag(k*(k_min)) * h / (P+1), the smallest-k sample of the
/// primary branch standing in for k = 0.
double ibm_induced_dissipation(const Eigen::VectorXcd& primary_kstar, double h, int P);

/// Primary-mode dispersion/dissipation curves, normalized by h/(P+1).
struct DispersionCurve {
  Eigen::VectorXd kgrid;         // input k, normalized k h/(P+1)
  Eigen::VectorXd khat;          // rescaled (and shifted, if applied), normalized
  Eigen::VectorXd primary_real;  // Real(k*) h/(P+1)
  Eigen::VectorXd primary_imag;  // Imag(k*) h/(P+1)
  double gamma_ibm = 0.0;
  Eigen::VectorXd corrected_imag;  // primary_imag - gamma_ibm
  Eigen::MatrixXcd all_modes;      // branch-tracked eigenvalues, n_k x n_modes
  std::vector<ModeLabel> labels;   // per branch
  int primary_branch = -1;
  bool shift_applied = false;
};

/// 200 uniform samples of k h/(P+1) in (0.005, pi], in physical units.
Eigen::VectorXd default_kgrid(const FRConfig& cfg, const MeshSpec& mesh, int n_samples = 200,
                              double x_min = 0.005, double x_max = M_PI);

/// Semi-discrete eigensolution sweep: assembles M(k) with Bloch phases
/// per grid point, decomposes, classifies, rescales and subtracts
/// gamma_IBM. shift adds pi/(N h) to the wavenumber before rescaling
/// (khat and primary identification); the operator itself stays at k.
DispersionCurve sweep_semi_discrete(const FRConfig& cfg, const MeshSpec& mesh,
                                    const MaskSpec& mask, const PenalizationSpec& pen,
                                    const Eigen::VectorXd& kgrid, bool shift = false);

/// Short-term diffusion: (1/(P+1)) Real[(u0^dag M u0)/(u0^dag u0)].
double short_term_diffusion(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& u0, int P);

struct NonModalCurve {
  Eigen::VectorXd kgrid;        // normalized k h/(P+1)
  Eigen::VectorXd omega_tilde;  // short-term diffusion per k
  Eigen::VectorXd omega_tilde_corrected;  // minus the smallest-k value
};

/// Short-term diffusion over the grid with wave initial data
/// u0 = exp(i k x) sampled at the global solution points.
NonModalCurve nonmodal_sweep(const FRConfig& cfg, const MeshSpec& mesh, const MaskSpec& mask,
                             const PenalizationSpec& pen, const Eigen::VectorXd& kgrid);

}  // namespace fribm
