#include "fribm/fully_discrete.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fribm {

Complex rk3_gain(Complex z) { return 1.0 + z + 0.5 * z * z + z * z * z / 6.0; }

Eigen::MatrixXcd amplification(const Eigen::MatrixXcd& M, double dt) {
  if (!(dt > 0.0)) throw config_error("amplification: dt must be > 0");
  const int n = static_cast<int>(M.rows());
  Eigen::MatrixXcd Z = dt * M;
  Eigen::MatrixXcd Z2 = Z * Z;
  return Eigen::MatrixXcd::Identity(n, n) + Z + 0.5 * Z2 + (1.0 / 6.0) * Z2 * Z;
}

Eigen::VectorXcd fd_modified_wavenumbers(const Eigen::VectorXcd& a_eigenvalues, double dt, double c) {
  if (!(dt > 0.0)) throw config_error("fd_modified_wavenumbers: dt must be > 0");
  if (c == 0.0) throw config_error("fd_modified_wavenumbers: c must be nonzero");
  Eigen::VectorXcd kstar(a_eigenvalues.size());
  for (int m = 0; m < a_eigenvalues.size(); ++m) {
    const Complex lam = a_eigenvalues[m];
    if (lam == Complex(0.0, 0.0))
      throw numerical_error("fd_modified_wavenumbers: mode " + std::to_string(m) +
                            " was fully annihilated (lambda = 0)");
    kstar[m] = Complex(0.0, 1.0) * std::log(lam) / (c * dt);
  }
  return kstar;
}

double cfl_number(double c, double dt, int P, double h) {
  if (!(h > 0.0)) throw config_error("cfl: h must be > 0");
  return c * dt * (2.0 * P + 1.0) / h;
}

double dt_from_cfl(double cfl, double c, int P, double h) {
  if (!(h > 0.0)) throw config_error("dt_from_cfl: h must be > 0");
  if (c == 0.0) throw config_error("dt_from_cfl: c must be nonzero");
  return cfl * h / (c * (2.0 * P + 1.0));
}

namespace {

std::vector<ModeSet> mode_sets_over_grid(const FRConfig& cfg, const MeshSpec& mesh,
                                         const MaskSpec& mask, const PenalizationSpec& pen,
                                         const Eigen::VectorXd& kgrid) {
  const int n_k = static_cast<int>(kgrid.size());
  std::vector<ModeSet> sets(n_k);
  parallel_for(n_k, [&](int j) {
    GlobalOperator op =
        assemble_semi_discrete(kgrid[j], cfg, mesh, mask, pen, PhaseMode::BlochPhases);
    sets[j] = mode_set(op);
  });
  return sets;
}

// Fully-discrete dissipation Imag(k*) = ln|R(dt lambda)| / (c dt).
double fd_dissipation(Complex lambda_m, double dt, double c) {
  return std::log(std::abs(rk3_gain(dt * lambda_m))) / (c * dt);
}

// Max fully-discrete dissipation over the labeled solid branches, or
// over all non-primary branches when none is labeled (fallback).
std::pair<double, bool> max_solid_fd_dissipation(const TrackedModes& tm, double dt, double c) {
  const int n_k = static_cast<int>(tm.lambda.rows());
  const int n_m = static_cast<int>(tm.lambda.cols());
  bool fallback = tm.solid_branches.empty();
  double worst = -std::numeric_limits<double>::infinity();
  for (int b = 0; b < n_m; ++b) {
    bool candidate = fallback ? (b != tm.primary) : (tm.labels[b] == ModeLabel::Solid);
    if (!candidate) continue;
    for (int j = 0; j < n_k; ++j)
      worst = std::max(worst, fd_dissipation(tm.lambda(j, b), dt, c));
  }
  return {worst, fallback};
}

}  // namespace

FDCurve sweep_fully_discrete(const FRConfig& cfg, const MeshSpec& mesh, const MaskSpec& mask,
                             const PenalizationSpec& pen, double dt, const Eigen::VectorXd& kgrid,
                             bool shift) {
  cfg.validate();
  mesh.validate();
  if (!(dt > 0.0)) throw config_error("sweep_fully_discrete: dt must be > 0");

  const double h = mesh.h();
  const double norm = h / (cfg.P + 1);
  const double k_shift = shift ? M_PI / (mesh.N * h) : 0.0;
  std::vector<ModeSet> sets = mode_sets_over_grid(cfg, mesh, mask, pen, kgrid);
  TrackedModes tm = classify_modes(sets, mask.r, pen.eta, k_shift);
  const int n_k = static_cast<int>(kgrid.size());
  const int n_m = static_cast<int>(tm.lambda.cols());

  FDCurve curve;
  curve.dt = dt;
  curve.cfl = cfl_number(cfg.c, dt, cfg.P, h);
  curve.kgrid = kgrid * norm;
  curve.khat.resize(n_k);
  curve.primary_real.resize(n_k);
  curve.primary_real_unwrapped.resize(n_k);
  curve.primary_imag.resize(n_k);
  curve.solid_imag = Eigen::VectorXd::Constant(n_k, std::numeric_limits<double>::quiet_NaN());
  curve.solid_present = !tm.solid_branches.empty();
  curve.used_fallback = false;
  curve.per_k.resize(n_k);

  // most unstable solid branch over the whole grid (constant by definition)
  int solid_branch = -1;
  if (curve.solid_present) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int b : tm.solid_branches) {
      double d = fd_dissipation(tm.lambda(0, b), dt, cfg.c);
      if (d > worst) {
        worst = d;
        solid_branch = b;
      }
    }
  }

  const double period = 2.0 * M_PI / (cfg.c * dt);
  double prev_unwrapped = 0.0;
  for (int j = 0; j < n_k; ++j) {
    FDResult& res = curve.per_k[j];
    res.k = kgrid[j];
    res.dt = dt;
    res.cfl = curve.cfl;
    res.a_eigenvalues.resize(n_m);
    for (int b = 0; b < n_m; ++b) res.a_eigenvalues[b] = rk3_gain(dt * tm.lambda(j, b));
    res.kstar_fd = fd_modified_wavenumbers(res.a_eigenvalues, dt, cfg.c);
    res.stable = true;
    for (int b = 0; b < n_m; ++b)
      if (std::abs(res.a_eigenvalues[b]) > 1.0 + kStabilityTol) res.stable = false;
    if (solid_branch >= 0) {
      res.solid_mode_dissipation = res.kstar_fd[solid_branch].imag();
      curve.solid_imag[j] = res.solid_mode_dissipation * norm;
    }
    if (!res.stable) curve.stable = false;

    curve.khat[j] = rescale_wavenumber(kgrid[j] + k_shift, mask.r) * norm;
    const double wrapped = res.kstar_fd[tm.primary].real();
    double unwrapped = wrapped;
    if (j > 0) {
      double shift_cycles = std::round((prev_unwrapped - wrapped) / period);
      unwrapped = wrapped + shift_cycles * period;
    }
    prev_unwrapped = unwrapped;
    curve.primary_real[j] = wrapped * norm;
    curve.primary_real_unwrapped[j] = unwrapped * norm;
    curve.primary_imag[j] = res.kstar_fd[tm.primary].imag() * norm;
  }
  curve.gamma_ibm_fd = curve.primary_imag[0];
  curve.corrected_imag = curve.primary_imag.array() - curve.gamma_ibm_fd;
  return curve;
}

double find_cfl_max(const FRConfig& cfg, const MeshSpec& mesh, const Eigen::VectorXd& kgrid) {
  cfg.validate();
  mesh.validate();
  if (kgrid.size() < 1) throw config_error("find_cfl_max: empty kgrid");

  NodeSet nodes = gauss_nodes(cfg.P);
  MaskSpec no_solid = build_mask(mesh, 0, nodes);
  PenalizationSpec pen;  // eta unused with an empty mask

  // Semi-discrete spectra once; stability for any dt is then a cheap map.
  const int n_k = static_cast<int>(kgrid.size());
  std::vector<Eigen::VectorXcd> spectra(n_k);
  parallel_for(n_k, [&](int j) {
    GlobalOperator op =
        assemble_semi_discrete(kgrid[j], cfg, mesh, no_solid, pen, PhaseMode::BlochPhases);
    spectra[j] = eig_dense(op.entries).values;
  });

  auto stable_at = [&](double cfl) {
    const double dt = dt_from_cfl(cfl, cfg.c, cfg.P, mesh.h());
    for (const auto& lam : spectra)
      for (int m = 0; m < lam.size(); ++m)
        if (std::abs(rk3_gain(dt * lam[m])) > 1.0 + kStabilityTol) return false;
    return true;
  };

  double lo = 0.0, hi = 1.0;
  int doublings = 0;
  while (stable_at(hi)) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 64)
      throw numerical_error("find_cfl_max: no unstable CFL found below 2^64");
  }
  if (lo == 0.0 && !stable_at(1e-8))
    throw numerical_error("find_cfl_max: scheme unstable even at CFL = 1e-8");
  while ((hi - lo) / hi > 1e-4) {
    double mid = 0.5 * (lo + hi);
    (stable_at(mid) ? lo : hi) = mid;
  }
  return lo;
}

CriticalEtaResult find_critical_eta(const FRConfig& cfg, const MeshSpec& mesh, const MaskSpec& mask,
                                    double dt, const Eigen::VectorXd& kgrid) {
  cfg.validate();
  mesh.validate();
  if (!(dt > 0.0)) throw config_error("find_critical_eta: dt must be > 0");
  if (mask.Z < 1) throw config_error("find_critical_eta: mask needs at least one solid element");

  CriticalEtaResult result;
  result.dt = dt;

  auto evaluate = [&](double eta) {
    PenalizationSpec pen;
    pen.eta = eta;
    std::vector<ModeSet> sets = mode_sets_over_grid(cfg, mesh, mask, pen, kgrid);
    TrackedModes tm = track_modes(sets);
    label_solid_branches(tm, mask.r, eta);
    if (tm.solid_branches.empty()) {
      // Solid modes merged into the secondary spectrum (large eta, weak
      // penalty): exclude the primary and take the worst of the rest.
      select_primary(tm, rescale_wavenumber(sets[0].k, mask.r));
    }
    auto [dissipation, fallback] = max_solid_fd_dissipation(tm, dt, cfg.c);
    result.used_fallback = result.used_fallback || fallback;
    result.evaluations.emplace_back(eta, dissipation);
    return dissipation;
  };

  double eta_lo = 0.1 * dt, eta_hi = 2.0 * dt;
  double f_lo = evaluate(eta_lo);
  double f_hi = evaluate(eta_hi);
  if (!(f_lo > 0.0) || !(f_hi < 0.0)) {
    std::ostringstream msg;
    msg << "find_critical_eta: no sign change in [0.1 dt, 2 dt]; dissipation(" << eta_lo
        << ") = " << f_lo << ", dissipation(" << eta_hi << ") = " << f_hi;
    throw numerical_error(msg.str());
  }

  while ((eta_hi - eta_lo) / eta_hi > 1e-3) {
    double mid = 0.5 * (eta_lo + eta_hi);
    double f_mid = evaluate(mid);
    if (f_mid > 0.0)
      eta_lo = mid;
    else
      eta_hi = mid;
  }
  result.eta_unstable = eta_lo;
  result.eta_stable = eta_hi;

  // The verdict must flip exactly once along eta; anything else is
  // reported, not silently accepted.
  auto evals = result.evaluations;
  std::sort(evals.begin(), evals.end());
  int changes = 0;
  for (size_t i = 1; i < evals.size(); ++i)
    if ((evals[i - 1].second > 0.0) != (evals[i].second > 0.0)) ++changes;
  if (changes != 1) {
    result.monotone = false;
    std::ostringstream msg;
    msg << "stability verdict changed sign " << changes << " times across the bracket";
    result.diagnostic = msg.str();
  }
  return result;
}

}  // namespace fribm
