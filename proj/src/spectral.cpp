#include "fribm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace fribm {

const char* to_string(ModeLabel label) {
  switch (label) {
    case ModeLabel::Primary: return "primary";
    case ModeLabel::Secondary: return "secondary";
    case ModeLabel::Solid: return "solid";
  }
  return "?";
}

EigResult eig_dense(const Eigen::MatrixXcd& A) {
  const int n = static_cast<int>(A.rows());
  if (n == 0 || A.cols() != n) throw config_error("eig_dense: matrix must be square and nonempty");
  if (n > 4096) throw config_error("eig_dense: size " + std::to_string(n) + " exceeds the 4096 cap");
  if (!A.allFinite()) throw config_error("eig_dense: matrix has non-finite entries");

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(A, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw numerical_error("eig_dense: QR iteration failed to converge on a " + std::to_string(n) +
                          "x" + std::to_string(n) + " matrix");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& vals = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (vals[a].real() != vals[b].real()) return vals[a].real() > vals[b].real();
    return vals[a].imag() > vals[b].imag();
  });

  EigResult out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    out.values[i] = vals[order[i]];
    Eigen::VectorXcd v = solver.eigenvectors().col(order[i]);
    // fix the phase: largest-magnitude entry real and positive
    int imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    Complex piv = v[imax];
    if (std::abs(piv) > 0.0) v *= std::conj(piv) / std::abs(piv);
    out.vectors.col(i) = v / v.norm();
  }

  const double scale = A.norm();  // Frobenius
  double worst = 0.0;
  Eigen::MatrixXcd resid = A * out.vectors - out.vectors * out.values.asDiagonal();
  for (int i = 0; i < n; ++i) worst = std::max(worst, resid.col(i).norm());
  if (worst > 1e-9 * scale) {
    std::ostringstream msg;
    msg << "eig_dense: residual " << worst << " exceeds 1e-9*||A|| = " << 1e-9 * scale
        << " on a " << n << "x" << n << " matrix";
    throw numerical_error(msg.str());
  }
  return out;
}

Eigen::VectorXcd modified_wavenumbers(const Eigen::VectorXcd& eigenvalues, double c) {
  if (c == 0.0) throw config_error("modified_wavenumbers: c must be nonzero");
  Eigen::VectorXcd kstar(eigenvalues.size());
  for (int i = 0; i < eigenvalues.size(); ++i)
    kstar[i] = Complex(-eigenvalues[i].imag() / c, eigenvalues[i].real() / c);
  return kstar;
}

double rescale_wavenumber(double k, double r) {
  if (r < 0.0 || r >= 1.0) throw config_error("rescale_wavenumber: r must lie in [0, 1)");
  return k / (1.0 - r);
}

ModeSet mode_set(const GlobalOperator& op) {
  ModeSet ms;
  ms.k = op.k;
  EigResult eig = eig_dense(op.entries);
  ms.eigenvalues = std::move(eig.values);
  ms.eigenvectors = std::move(eig.vectors);
  ms.kstar = modified_wavenumbers(ms.eigenvalues, op.cfg.c);
  ms.labels.assign(ms.eigenvalues.size(), ModeLabel::Secondary);
  return ms;
}

namespace {

// Global greedy assignment on the overlap matrix |V_j^dag V_{j+1}|.
// Overlaps tying within 1e-6 for the same source mode are broken by the
// smaller eigenvalue jump.
std::vector<int> match_modes(const Eigen::MatrixXcd& v_prev, const Eigen::VectorXcd& lam_prev,
                             const Eigen::MatrixXcd& v_next, const Eigen::VectorXcd& lam_next) {
  const int n = static_cast<int>(v_prev.cols());
  Eigen::MatrixXd overlap = (v_prev.adjoint() * v_next).cwiseAbs();

  struct Entry {
    double o;
    int i, l;
  };
  std::vector<Entry> entries;
  entries.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) entries.push_back({overlap(i, l), i, l});
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.o != b.o) return a.o > b.o;
    if (a.i != b.i) return a.i < b.i;
    return a.l < b.l;
  });

  std::vector<int> next_of(n, -1);
  std::vector<char> used(n, 0);
  int assigned = 0;
  for (size_t e = 0; e < entries.size() && assigned < n; ++e) {
    const Entry& cand = entries[e];
    if (next_of[cand.i] != -1 || used[cand.l]) continue;
    int best_l = cand.l;
    double best_jump = std::abs(lam_prev[cand.i] - lam_next[cand.l]);
    for (size_t f = e + 1; f < entries.size() && entries[f].o >= cand.o - 1e-6; ++f) {
      if (entries[f].i != cand.i || used[entries[f].l]) continue;
      double jump = std::abs(lam_prev[cand.i] - lam_next[entries[f].l]);
      if (jump < best_jump) {
        best_jump = jump;
        best_l = entries[f].l;
      }
    }
    next_of[cand.i] = best_l;
    used[best_l] = 1;
    ++assigned;
  }
  return next_of;
}

}  // namespace

TrackedModes track_modes(const std::vector<ModeSet>& sets) {
  if (sets.empty()) throw config_error("track_modes: no mode sets");
  const int n_k = static_cast<int>(sets.size());
  const int n_m = static_cast<int>(sets[0].eigenvalues.size());
  for (const auto& s : sets)
    if (s.eigenvalues.size() != n_m)
      throw config_error("track_modes: inconsistent mode counts across the grid");

  TrackedModes tm;
  tm.lambda.resize(n_k, n_m);
  tm.kstar.resize(n_k, n_m);
  tm.mode_index.resize(n_k, n_m);
  tm.labels.assign(n_m, ModeLabel::Secondary);

  // branch b starts at mode b of the first sample
  for (int b = 0; b < n_m; ++b) {
    tm.mode_index(0, b) = b;
    tm.lambda(0, b) = sets[0].eigenvalues[b];
    tm.kstar(0, b) = sets[0].kstar[b];
  }
  for (int j = 0; j + 1 < n_k; ++j) {
    std::vector<int> next =
        match_modes(sets[j].eigenvectors, sets[j].eigenvalues, sets[j + 1].eigenvectors,
                    sets[j + 1].eigenvalues);
    for (int b = 0; b < n_m; ++b) {
      int cur = tm.mode_index(j, b);
      int nxt = next[cur];
      tm.mode_index(j + 1, b) = nxt;
      tm.lambda(j + 1, b) = sets[j + 1].eigenvalues[nxt];
      tm.kstar(j + 1, b) = sets[j + 1].kstar[nxt];
    }
  }
  return tm;
}

void label_solid_branches(TrackedModes& tm, double r, double eta) {
  if (!(r > 0.0)) return;  // no penalty term, no solid modes
  const int n_k = static_cast<int>(tm.lambda.rows());
  const int n_m = static_cast<int>(tm.lambda.cols());
  const double tol_solid = 1e-6 / eta;
  for (int b = 0; b < n_m; ++b) {
    double re_min = tm.lambda(0, b).real(), re_max = re_min;
    double im_min = tm.lambda(0, b).imag(), im_max = im_min;
    for (int j = 1; j < n_k; ++j) {
      re_min = std::min(re_min, tm.lambda(j, b).real());
      re_max = std::max(re_max, tm.lambda(j, b).real());
      im_min = std::min(im_min, tm.lambda(j, b).imag());
      im_max = std::max(im_max, tm.lambda(j, b).imag());
    }
    if (std::hypot(re_max - re_min, im_max - im_min) < tol_solid) {
      tm.labels[b] = ModeLabel::Solid;
      tm.solid_branches.push_back(b);
    }
  }
}

void select_primary(TrackedModes& tm, double khat_min) {
  const int n_m = static_cast<int>(tm.lambda.cols());
  int best = -1, runner = -1;
  double best_score = 0.0, runner_score = 0.0;
  for (int b = 0; b < n_m; ++b) {
    if (tm.labels[b] == ModeLabel::Solid) continue;
    double score = std::abs(tm.kstar(0, b).real() / khat_min - 1.0);
    if (best < 0 || score < best_score) {
      runner = best;
      runner_score = best_score;
      best = b;
      best_score = score;
    } else if (runner < 0 || score < runner_score) {
      runner = b;
      runner_score = score;
    }
  }
  if (best < 0) throw numerical_error("select_primary: no candidate primary branch");
  if (runner >= 0 && runner_score - best_score < 1e-3) {
    std::ostringstream msg;
    msg << "select_primary: ambiguous primary against khat = " << khat_min
        << "; candidates branch " << best << " (score " << best_score << ", lambda "
        << tm.lambda(0, best) << ") and branch " << runner << " (score " << runner_score
        << ", lambda " << tm.lambda(0, runner) << ")";
    throw numerical_error(msg.str());
  }
  tm.primary = best;
  tm.labels[best] = ModeLabel::Primary;
}

TrackedModes classify_modes(std::vector<ModeSet>& sets, double r, double eta, double k_shift) {
  TrackedModes tm = track_modes(sets);
  label_solid_branches(tm, r, eta);
  select_primary(tm, rescale_wavenumber(sets[0].k + k_shift, r));

  const int n_k = static_cast<int>(sets.size());
  const int n_m = static_cast<int>(tm.lambda.cols());
  for (int j = 0; j < n_k; ++j) {
    auto& labels = sets[j].labels;
    labels.assign(n_m, ModeLabel::Secondary);
    for (int b = 0; b < n_m; ++b) labels[tm.mode_index(j, b)] = tm.labels[b];
  }
  return tm;
}

double ibm_induced_dissipation(const Eigen::VectorXcd& primary_kstar, double h, int P) {
  if (primary_kstar.size() == 0)
    throw config_error("ibm_induced_dissipation: empty primary branch");
  return primary_kstar[0].imag() * h / (P + 1);
}

Eigen::VectorXd default_kgrid(const FRConfig& cfg, const MeshSpec& mesh, int n_samples,
                              double x_min, double x_max) {
  if (n_samples < 2) throw config_error("default_kgrid: need at least 2 samples");
  const double scale = (cfg.P + 1) / mesh.h();
  Eigen::VectorXd k(n_samples);
  for (int i = 0; i < n_samples; ++i)
    k[i] = (x_min + (x_max - x_min) * i / (n_samples - 1.0)) * scale;
  return k;
}

DispersionCurve sweep_semi_discrete(const FRConfig& cfg, const MeshSpec& mesh,
                                    const MaskSpec& mask, const PenalizationSpec& pen,
                                    const Eigen::VectorXd& kgrid, bool shift) {
  cfg.validate();
  mesh.validate();
  const int n_k = static_cast<int>(kgrid.size());
  if (n_k < 2) throw config_error("sweep_semi_discrete: kgrid needs at least 2 samples");
  for (int j = 0; j + 1 < n_k; ++j)
    if (!(kgrid[j] < kgrid[j + 1]))
      throw config_error("sweep_semi_discrete: kgrid must be strictly increasing");
  if (!(kgrid[0] > 0.0)) throw config_error("sweep_semi_discrete: kgrid must be positive");

  const double h = mesh.h();
  const double norm = h / (cfg.P + 1);
  const double k_shift = shift ? M_PI / (mesh.N * h) : 0.0;

  std::vector<ModeSet> sets(n_k);
  parallel_for(n_k, [&](int j) {
    try {
      GlobalOperator op =
          assemble_semi_discrete(kgrid[j], cfg, mesh, mask, pen, PhaseMode::BlochPhases);
      sets[j] = mode_set(op);
    } catch (const numerical_error& err) {
      throw numerical_error("sweep_semi_discrete at k = " + std::to_string(kgrid[j]) + ": " +
                            err.what());
    }
  });

  TrackedModes tm = classify_modes(sets, mask.r, pen.eta, k_shift);

  DispersionCurve curve;
  curve.kgrid = kgrid * norm;
  curve.khat.resize(n_k);
  curve.primary_real.resize(n_k);
  curve.primary_imag.resize(n_k);
  for (int j = 0; j < n_k; ++j) {
    curve.khat[j] = rescale_wavenumber(kgrid[j] + k_shift, mask.r) * norm;
    curve.primary_real[j] = tm.kstar(j, tm.primary).real() * norm;
    curve.primary_imag[j] = tm.kstar(j, tm.primary).imag() * norm;
  }
  curve.gamma_ibm = mask.r > 0.0 ? ibm_induced_dissipation(tm.kstar.col(tm.primary), h, cfg.P) : 0.0;
  curve.corrected_imag = curve.primary_imag.array() - curve.gamma_ibm;
  curve.all_modes = std::move(tm.lambda);
  curve.labels = std::move(tm.labels);
  curve.primary_branch = tm.primary;
  curve.shift_applied = shift;
  return curve;
}

double short_term_diffusion(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& u0, int P) {
  const double nrm2 = u0.squaredNorm();
  if (!(nrm2 > 0.0)) throw config_error("short_term_diffusion: u0 must be nonzero");
  const Complex quotient = (u0.adjoint() * M * u0)(0, 0) / nrm2;
  return quotient.real() / (P + 1);
}

NonModalCurve nonmodal_sweep(const FRConfig& cfg, const MeshSpec& mesh, const MaskSpec& mask,
                             const PenalizationSpec& pen, const Eigen::VectorXd& kgrid) {
  cfg.validate();
  mesh.validate();
  const int n_k = static_cast<int>(kgrid.size());
  if (n_k < 1) throw config_error("nonmodal_sweep: empty kgrid");

  NodeSet nodes = gauss_nodes(cfg.P);
  const Eigen::VectorXd x = global_points(mesh, nodes);
  NonModalCurve curve;
  curve.kgrid = kgrid * (mesh.h() / (cfg.P + 1));
  curve.omega_tilde.resize(n_k);
  parallel_for(n_k, [&](int j) {
    GlobalOperator op =
        assemble_semi_discrete(kgrid[j], cfg, mesh, mask, pen, PhaseMode::BlochPhases);
    Eigen::VectorXcd u0(x.size());
    for (int p = 0; p < x.size(); ++p) u0[p] = std::exp(Complex(0.0, kgrid[j] * x[p]));
    curve.omega_tilde[j] = short_term_diffusion(op.entries, u0, cfg.P);
  });
  curve.omega_tilde_corrected = curve.omega_tilde.array() - curve.omega_tilde[0];
  return curve;
}

}  // namespace fribm
