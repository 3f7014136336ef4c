#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fribm/common.hpp"
#include "fribm/ibm_assembly.hpp"

namespace fribm {

enum class ICForm { ComplexExponential, Sine };

/// One time-domain run of the penalized advection equation on the
/// UnitPhases (physically periodic) operator, advanced by Heun's
/// third-order RK. k0 must be periodic-admissible: k0 = m pi / T.
struct SimulationSpec {
  FRConfig cfg;
  MeshSpec mesh;
  MaskSpec mask;
  PenalizationSpec pen;
  double dt = 0.0;
  double t_final = 0.0;
  double k0 = 0.0;
  ICForm ic_form = ICForm::Sine;
  int snapshot_stride = 0;           // steps between snapshots; 0 = none
  double blowup_factor = 1e6;        // halt when ||u|| exceeds this times ||u0||

  void validate() const;
};

struct SimulationResult {
  Eigen::VectorXcd final_state;
  std::vector<double> snapshot_times;
  std::vector<Eigen::VectorXcd> snapshots;
  double error = 0.0;  // RMS over the fluid window at the final (or halt) state
  bool stable = true;
  double blowup_time = std::numeric_limits<double>::quiet_NaN();
  long steps = 0;
};

SimulationResult simulate(const SimulationSpec& spec);

/// RMS of the state against u_exact = 0 over the solution points with
/// x in [Delta, T], downstream of the solid. Fails on an empty window.
double error_rms(const Eigen::VectorXcd& state, const MeshSpec& mesh, const MaskSpec& mask,
                 const NodeSet& nodes);

/// Largest dt with max_m |R(dt lambda_m)| <= 1 + 1e-10, bisected to 1e-4
/// relative. The spectral stability verdict for the simulation operator.
/// Returns 0 when no dt qualifies (spectrum with growing modes).
double spectral_critical_dt(const Eigen::VectorXcd& eigenvalues);

/// Largest dt keeping every mode's RK3 gain within a whisker of the true
/// semigroup growth e^{dt Re lambda}: the step resolves the stiff decaying
/// part while tolerating modes the operator itself amplifies (penalized
/// runs past the optimum eta_v have such modes). Equals
/// spectral_critical_dt for spectra without growing modes.
double rk3_step_limit(const Eigen::VectorXcd& eigenvalues);

struct SweepOptions {
  double dt = 0.0;       // fixed step; 0 picks safety * spectral critical dt per cell
  double dt_cap = 1e-4;  // accuracy ceiling for the automatic choice
  double safety = 0.7;
  double t_final = 1.1;
  bool refine = true;    // golden-section refinement of the argmin
  double refine_rel_tol = 0.02;
};

struct SweepResult {
  Eigen::VectorXd eta_grid, eta_v_grid;
  Eigen::MatrixXd error;        // n_eta x n_eta_v
  Eigen::MatrixXd critical_dt;  // spectral estimate per cell
  Eigen::MatrixXd dt_used;
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> stable;
  std::vector<double> eta_v_opt;  // per eta, refined when requested
  std::vector<double> opt_error;
  std::vector<char> opt_defined;  // false when every cell of the row is unstable
  double k0 = 0.0;
  SweepOptions options;
};

/// Error landscape over (eta, eta_v). Each cell is a full simulation;
/// unstable cells are excluded from the argmin (ties take the smaller
/// eta_v).
SweepResult sweep_eta_v(const FRConfig& cfg, const MeshSpec& mesh, const MaskSpec& mask,
                        const PenalizationSpec& base, const Eigen::VectorXd& eta_grid,
                        const Eigen::VectorXd& eta_v_grid, double k0, const SweepOptions& options);

struct CriticalDtEvaluation {
  double dt = 0.0;
  bool sim_stable = false;
  bool spectral_stable = false;
};

struct CriticalDtResult {
  double dt_stable = 0.0;    // largest dt verified stable by simulation
  double dt_unstable = 0.0;  // smallest dt verified unstable
  double dt_spectral = 0.0;  // |R| <= 1 verdict for cross-validation
  bool spectral_mismatch = false;
  std::string diagnostic;
  std::vector<CriticalDtEvaluation> evaluations;

  double dt_critical() const { return 0.5 * (dt_stable + dt_unstable); }
};

/// Bisection (1e-3 relative) on dt for the stable/unstable transition of
/// the simulation over the given horizon, cross-validated against the
/// fully-discrete spectral verdict; disagreements are reported in the
/// diagnostic.
CriticalDtResult find_critical_dt(const FRConfig& cfg, const MeshSpec& mesh, const MaskSpec& mask,
                                  const PenalizationSpec& pen, double k0, double t_horizon = 1.1,
                                  ICForm ic_form = ICForm::Sine);

struct ScalingCase {
  double r = 0.0;
  int P = 0;
  double eta = 0.0;
  double eta_v_opt = 0.0;
};

struct ScalingFit {
  std::map<int, double> constant;  // C(P), geometric mean of eta*eta_v_opt/r^2
  std::map<int, double> residual;  // max relative deviation within the group
  std::vector<ScalingCase> cases;
};

/// Requires at least 3 cases per polynomial-order group.
ScalingFit fit_scaling(const std::vector<ScalingCase>& cases);

/// eta_v estimate C(P) * r^2 / eta with C = 0.09 for P in {2,3} and
/// C = 0.05 for P = 4. Other orders are rejected, no extrapolation.
double eta_v_guideline(double eta, double r, int P);

struct DecaySample {
  double eta = 0.0;
  double error = 0.0;
  bool included = true;
};

struct DecayEstimate {
  double slope = 0.0;
  double slope_stderr = 0.0;
  std::vector<DecaySample> samples;
  int n_used = 0;
};

/// Log-log slope of the fluid-window error against eta, informational.
/// The eta list must span at least two decades; unstable runs are
/// excluded and flagged.
DecayEstimate estimate_penalization_decay(const FRConfig& cfg, const MeshSpec& mesh,
                                          const MaskSpec& mask, double k0,
                                          const std::vector<double>& etas);

}  // namespace fribm
