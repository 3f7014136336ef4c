#include "fribm/timedomain.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include "fribm/fully_discrete.hpp"

namespace fribm {

void SimulationSpec::validate() const {
  cfg.validate();
  mesh.validate();
  pen.validate();
  if (!(dt > 0.0)) throw config_error("simulate: dt must be > 0");
  if (t_final < 0.0) throw config_error("simulate: t_final must be >= 0");
  if (snapshot_stride < 0) throw config_error("simulate: snapshot_stride must be >= 0");
  const double m = k0 * mesh.T / M_PI;
  if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, std::abs(m)))
    throw config_error("simulate: k0 must be an integer multiple of pi/T for periodicity, got k0 = " +
                       std::to_string(k0));
}

namespace {

template <typename Scalar>
Eigen::SparseMatrix<Scalar> sparsify(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& M) {
  Eigen::SparseMatrix<Scalar> S(M.rows(), M.cols());
  std::vector<Eigen::Triplet<Scalar>> trip;
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j)
      if (M(i, j) != Scalar(0)) trip.emplace_back(i, j, M(i, j));
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

// Heun's third-order Runge-Kutta on du/dt = M u + b.
template <typename Scalar>
struct Rk3Run {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> state;
  bool stable = true;
  double blowup_time = std::numeric_limits<double>::quiet_NaN();
  long steps = 0;
  std::vector<double> snapshot_times;
  std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> snapshots;
};

template <typename Scalar>
Rk3Run<Scalar> run_rk3(const Eigen::SparseMatrix<Scalar>& M,
                       const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b,
                       Eigen::Matrix<Scalar, Eigen::Dynamic, 1> u, double dt, double t_final,
                       int snapshot_stride, double blowup_factor) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Rk3Run<Scalar> run;
  const bool affine = b.size() > 0;
  const double norm0 = u.norm();
  const double limit = blowup_factor * std::max(norm0, 1e-300);
  double t = 0.0;

  auto rhs = [&](const Vec& v) -> Vec { return affine ? Vec(M * v + b) : Vec(M * v); };

  Vec k1, k2, k3;
  while (t < t_final) {
    const double step = std::min(dt, t_final - t);
    k1 = rhs(u);
    k2 = rhs(u + (step / 3.0) * k1);
    k3 = rhs(u + (2.0 * step / 3.0) * k2);
    u += (step / 4.0) * (k1 + 3.0 * k3);
    t += step;
    ++run.steps;
    if (snapshot_stride > 0 && run.steps % snapshot_stride == 0) {
      run.snapshot_times.push_back(t);
      run.snapshots.push_back(u);
    }
    if (!(u.norm() <= limit)) {  // catches NaN as well
      run.stable = false;
      run.blowup_time = t;
      break;
    }
  }
  run.state = std::move(u);
  return run;
}

}  // namespace

SimulationResult simulate(const SimulationSpec& spec) {
  spec.validate();
  NodeSet nodes = gauss_nodes(spec.cfg.P);
  const Eigen::VectorXd x = global_points(spec.mesh, nodes);
  GlobalOperator op = assemble_semi_discrete(0.0, spec.cfg, spec.mesh, spec.mask, spec.pen,
                                             PhaseMode::UnitPhases);

  // Penalty target u_s enters as the constant forcing (chi/eta) u_s.
  const bool forced = spec.pen.u_s != 0.0 && spec.mask.Z > 0;

  SimulationResult result;
  if (spec.ic_form == ICForm::Sine) {
    Eigen::VectorXd u0(x.size());
    for (int p = 0; p < x.size(); ++p) u0[p] = std::sin(spec.k0 * x[p]);
    Eigen::VectorXd b;
    if (forced) b = (spec.mask.chi.cast<double>() * (spec.pen.u_s / spec.pen.eta)).matrix();
    auto run = run_rk3<double>(sparsify<double>(op.real_entries()), b, u0, spec.dt, spec.t_final,
                               spec.snapshot_stride, spec.blowup_factor);
    result.final_state = run.state.cast<Complex>();
    result.stable = run.stable;
    result.blowup_time = run.blowup_time;
    result.steps = run.steps;
    result.snapshot_times = std::move(run.snapshot_times);
    for (auto& s : run.snapshots) result.snapshots.push_back(s.cast<Complex>());
  } else {
    Eigen::VectorXcd u0(x.size());
    for (int p = 0; p < x.size(); ++p) u0[p] = std::exp(Complex(0.0, spec.k0 * x[p]));
    Eigen::VectorXcd b;
    if (forced)
      b = (spec.mask.chi.cast<double>() * (spec.pen.u_s / spec.pen.eta)).matrix().cast<Complex>();
    auto run = run_rk3<Complex>(sparsify<Complex>(op.entries), b, u0, spec.dt, spec.t_final,
                                spec.snapshot_stride, spec.blowup_factor);
    result.final_state = std::move(run.state);
    result.stable = run.stable;
    result.blowup_time = run.blowup_time;
    result.steps = run.steps;
    result.snapshot_times = std::move(run.snapshot_times);
    result.snapshots = std::move(run.snapshots);
  }
  result.error = error_rms(result.final_state, spec.mesh, spec.mask, nodes);
  return result;
}

double error_rms(const Eigen::VectorXcd& state, const MeshSpec& mesh, const MaskSpec& mask,
                 const NodeSet& nodes) {
  const Eigen::VectorXd x = global_points(mesh, nodes);
  if (state.size() != x.size())
    throw config_error("error_rms: state has " + std::to_string(state.size()) +
                       " entries, mesh has " + std::to_string(x.size()) + " solution points");
  const double delta = mask.Z * mesh.h();
  double sum = 0.0;
  long count = 0;
  for (int p = 0; p < x.size(); ++p) {
    if (x[p] >= delta && x[p] <= mesh.T) {
      sum += std::norm(state[p]);
      ++count;
    }
  }
  if (count == 0)
    throw config_error("error_rms: empty evaluation window [Delta, T], Delta = " +
                       std::to_string(delta));
  return std::sqrt(sum / count);
}

namespace {

double largest_dt_where(const Eigen::VectorXcd& eigenvalues,
                        const std::function<bool(double)>& ok) {
  const double scale = eigenvalues.cwiseAbs().maxCoeff();
  if (scale == 0.0) return std::numeric_limits<double>::infinity();
  double lo = 0.0, hi = 1.0 / scale;
  if (!ok(hi)) {
    // shrink until the predicate holds somewhere, or give up at 0
    int halvings = 0;
    while (!ok(hi)) {
      hi *= 0.5;
      if (++halvings > 60) return 0.0;
    }
    lo = hi;
    hi *= 2.0;
  } else {
    int doublings = 0;
    while (ok(hi)) {
      lo = hi;
      hi *= 2.0;
      if (++doublings > 60) return lo;  // effectively unconditional
    }
  }
  while ((hi - lo) / hi > 1e-4) {
    double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

double spectral_critical_dt(const Eigen::VectorXcd& eigenvalues) {
  if (eigenvalues.size() == 0) throw config_error("spectral_critical_dt: empty spectrum");
  return largest_dt_where(eigenvalues, [&](double dt) {
    for (int m = 0; m < eigenvalues.size(); ++m)
      if (std::abs(rk3_gain(dt * eigenvalues[m])) > 1.0 + kStabilityTol) return false;
    return true;
  });
}

double rk3_step_limit(const Eigen::VectorXcd& eigenvalues) {
  if (eigenvalues.size() == 0) throw config_error("rk3_step_limit: empty spectrum");
  return largest_dt_where(eigenvalues, [&](double dt) {
    for (int m = 0; m < eigenvalues.size(); ++m) {
      const double growth = std::max(0.0, eigenvalues[m].real());
      if (std::log(std::abs(rk3_gain(dt * eigenvalues[m]))) > 1.05 * dt * growth + 1e-9)
        return false;
    }
    return true;
  });
}

namespace {

Eigen::VectorXcd unit_phase_eigenvalues(const FRConfig& cfg, const MeshSpec& mesh,
                                        const MaskSpec& mask, const PenalizationSpec& pen) {
  GlobalOperator op = assemble_semi_discrete(0.0, cfg, mesh, mask, pen, PhaseMode::UnitPhases);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(op.real_entries(), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw numerical_error("eigenvalue iteration failed on the simulation operator");
  return solver.eigenvalues();
}

struct CellOutcome {
  double error = 0.0;
  double dt_used = 0.0;
  double dt_spectral = 0.0;
  bool stable = false;
};

CellOutcome run_cell(const FRConfig& cfg, const MeshSpec& mesh, const MaskSpec& mask,
                     PenalizationSpec pen, double eta, double eta_v, double k0,
                     const SweepOptions& options) {
  pen.eta = eta;
  pen.eta_v = eta_v;
  CellOutcome out;
  out.dt_spectral = rk3_step_limit(unit_phase_eigenvalues(cfg, mesh, mask, pen));
  out.dt_used = options.dt > 0.0 ? options.dt
                                 : std::min(options.dt_cap, options.safety * out.dt_spectral);
  // Hard cap on the step count so a pathological cell cannot stall a sweep.
  const double dt_floor = options.t_final / 2e6;
  if (out.dt_used < dt_floor) {
    out.error = std::numeric_limits<double>::quiet_NaN();
    out.stable = false;
    return out;
  }

  SimulationSpec spec;
  spec.cfg = cfg;
  spec.mesh = mesh;
  spec.mask = mask;
  spec.pen = pen;
  spec.dt = out.dt_used;
  spec.t_final = options.t_final;
  spec.k0 = k0;
  spec.ic_form = ICForm::Sine;
  SimulationResult sim = simulate(spec);
  out.error = sim.error;
  out.stable = sim.stable;
  return out;
}

}  // namespace

SweepResult sweep_eta_v(const FRConfig& cfg, const MeshSpec& mesh, const MaskSpec& mask,
                        const PenalizationSpec& base, const Eigen::VectorXd& eta_grid,
                        const Eigen::VectorXd& eta_v_grid, double k0, const SweepOptions& options) {
  cfg.validate();
  mesh.validate();
  const int n_eta = static_cast<int>(eta_grid.size());
  const int n_v = static_cast<int>(eta_v_grid.size());
  if (n_eta < 1 || n_v < 1) throw config_error("sweep_eta_v: empty grid");
  for (int i = 0; i + 1 < n_eta; ++i)
    if (!(eta_grid[i] < eta_grid[i + 1]))
      throw config_error("sweep_eta_v: eta grid must be strictly increasing");
  for (int j = 0; j + 1 < n_v; ++j)
    if (!(eta_v_grid[j] < eta_v_grid[j + 1]))
      throw config_error("sweep_eta_v: eta_v grid must be strictly increasing");

  SweepResult result;
  result.eta_grid = eta_grid;
  result.eta_v_grid = eta_v_grid;
  result.error.resize(n_eta, n_v);
  result.critical_dt.resize(n_eta, n_v);
  result.dt_used.resize(n_eta, n_v);
  result.stable.resize(n_eta, n_v);
  result.k0 = k0;
  result.options = options;

  parallel_for(n_eta * n_v, [&](int cell) {
    const int i = cell / n_v;
    const int j = cell % n_v;
    CellOutcome out =
        run_cell(cfg, mesh, mask, base, eta_grid[i], eta_v_grid[j], k0, options);
    result.error(i, j) = out.error;
    result.critical_dt(i, j) = out.dt_spectral;
    result.dt_used(i, j) = out.dt_used;
    result.stable(i, j) = out.stable ? 1 : 0;
  });

  result.eta_v_opt.assign(n_eta, std::numeric_limits<double>::quiet_NaN());
  result.opt_error.assign(n_eta, std::numeric_limits<double>::quiet_NaN());
  result.opt_defined.assign(n_eta, 0);
  for (int i = 0; i < n_eta; ++i) {
    int arg = -1;
    for (int j = 0; j < n_v; ++j) {
      if (!result.stable(i, j)) continue;
      if (arg < 0 || result.error(i, j) < result.error(i, arg)) arg = j;
    }
    if (arg < 0) continue;  // every cell unstable: flagged undefined
    result.opt_defined[i] = 1;
    result.eta_v_opt[i] = eta_v_grid[arg];
    result.opt_error[i] = result.error(i, arg);

    // Golden-section refinement on log(eta_v) between the grid neighbors.
    if (!options.refine || arg == 0 || arg == n_v - 1 || eta_v_grid[arg - 1] <= 0.0) continue;
    double a = std::log(eta_v_grid[arg - 1]);
    double b = std::log(eta_v_grid[arg + 1]);
    auto eval = [&](double logv) {
      CellOutcome out =
          run_cell(cfg, mesh, mask, base, eta_grid[i], std::exp(logv), k0, options);
      return out.stable ? out.error : std::numeric_limits<double>::infinity();
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = eval(x1), f2 = eval(x2);
    while ((b - a) > options.refine_rel_tol) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - gr * (b - a);
        f1 = eval(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + gr * (b - a);
        f2 = eval(x2);
      }
    }
    const double best_log = f1 < f2 ? x1 : x2;
    const double best_err = std::min(f1, f2);
    if (best_err < result.opt_error[i]) {
      result.eta_v_opt[i] = std::exp(best_log);
      result.opt_error[i] = best_err;
    }
  }
  return result;
}

CriticalDtResult find_critical_dt(const FRConfig& cfg, const MeshSpec& mesh, const MaskSpec& mask,
                                  const PenalizationSpec& pen, double k0, double t_horizon,
                                  ICForm ic_form) {
  cfg.validate();
  mesh.validate();
  pen.validate();

  CriticalDtResult result;
  result.dt_spectral = spectral_critical_dt(unit_phase_eigenvalues(cfg, mesh, mask, pen));
  if (!std::isfinite(result.dt_spectral))
    throw numerical_error("find_critical_dt: simulation operator is unconditionally stable");

  auto sim_stable = [&](double dt) {
    SimulationSpec spec;
    spec.cfg = cfg;
    spec.mesh = mesh;
    spec.mask = mask;
    spec.pen = pen;
    spec.dt = dt;
    spec.t_final = t_horizon;
    spec.k0 = k0;
    spec.ic_form = ic_form;
    bool stable = simulate(spec).stable;
    result.evaluations.push_back({dt, stable, dt <= result.dt_spectral});
    return stable;
  };

  double lo = 0.5 * result.dt_spectral;
  double hi = 2.0 * result.dt_spectral;
  int tries = 0;
  while (!sim_stable(lo)) {
    hi = lo;
    lo *= 0.5;
    if (++tries > 40)
      throw numerical_error("find_critical_dt: no stable dt found down to " + std::to_string(lo));
  }
  tries = 0;
  while (sim_stable(hi)) {
    lo = hi;
    hi *= 2.0;
    if (++tries > 40)
      throw numerical_error("find_critical_dt: no unstable dt found up to " + std::to_string(hi));
  }
  while ((hi - lo) / hi > 1e-3) {
    double mid = 0.5 * (lo + hi);
    (sim_stable(mid) ? lo : hi) = mid;
  }
  result.dt_stable = lo;
  result.dt_unstable = hi;

  std::ostringstream diag;
  for (const auto& e : result.evaluations) {
    if (e.sim_stable != e.spectral_stable) {
      result.spectral_mismatch = true;
      diag << "dt = " << e.dt << ": simulation " << (e.sim_stable ? "stable" : "unstable")
           << " but spectral verdict " << (e.spectral_stable ? "stable" : "unstable") << "; ";
    }
  }
  result.diagnostic = diag.str();
  return result;
}

ScalingFit fit_scaling(const std::vector<ScalingCase>& cases) {
  ScalingFit fit;
  fit.cases = cases;
  std::map<int, std::vector<double>> groups;
  for (const auto& c : cases) {
    if (!(c.r > 0.0) || !(c.eta > 0.0) || !(c.eta_v_opt > 0.0))
      throw config_error("fit_scaling: cases need positive r, eta and eta_v_opt");
    groups[c.P].push_back(c.eta * c.eta_v_opt / (c.r * c.r));
  }
  if (groups.empty()) throw config_error("fit_scaling: no cases");
  for (auto& [P, values] : groups) {
    if (values.size() < 3)
      throw config_error("fit_scaling: P = " + std::to_string(P) + " group has only " +
                         std::to_string(values.size()) + " cases, need at least 3");
    double log_sum = 0.0;
    for (double v : values) log_sum += std::log(v);
    const double c_fit = std::exp(log_sum / values.size());
    double residual = 0.0;
    for (double v : values) residual = std::max(residual, std::abs(v - c_fit) / c_fit);
    fit.constant[P] = c_fit;
    fit.residual[P] = residual;
  }
  return fit;
}

double eta_v_guideline(double eta, double r, int P) {
  if (!(eta > 0.0)) throw config_error("eta_v_guideline: eta must be > 0");
  if (!(r > 0.0) || !(r < 1.0)) throw config_error("eta_v_guideline: r must lie in (0, 1)");
  double c_fit = 0.0;
  if (P == 2 || P == 3)
    c_fit = 0.09;
  else if (P == 4)
    c_fit = 0.05;
  else
    throw config_error("eta_v_guideline: unsupported polynomial order P = " + std::to_string(P) +
                       " (fitted constants exist for P in {2, 3, 4})");
  return c_fit * r * r / eta;
}

DecayEstimate estimate_penalization_decay(const FRConfig& cfg, const MeshSpec& mesh,
                                          const MaskSpec& mask, double k0,
                                          const std::vector<double>& etas) {
  if (etas.size() < 3) throw config_error("estimate_penalization_decay: need at least 3 etas");
  double eta_min = etas[0], eta_max = etas[0];
  for (double e : etas) {
    if (!(e > 0.0)) throw config_error("estimate_penalization_decay: etas must be positive");
    eta_min = std::min(eta_min, e);
    eta_max = std::max(eta_max, e);
  }
  if (eta_max / eta_min < 100.0)
    throw config_error("estimate_penalization_decay: eta list must span at least two decades");

  const double dt = std::min(1e-5, 0.5 * eta_min);
  DecayEstimate est;
  est.samples.resize(etas.size());
  parallel_for(static_cast<int>(etas.size()), [&](int i) {
    DecaySample& s = est.samples[i];
    s.eta = etas[i];
    if (s.eta < 0.5 * dt) {  // stability guardrail
      s.included = false;
      return;
    }
    SimulationSpec spec;
    spec.cfg = cfg;
    spec.mesh = mesh;
    spec.mask = mask;
    spec.pen.eta = s.eta;
    spec.dt = dt;
    spec.t_final = 1.1;
    spec.k0 = k0;
    SimulationResult sim = simulate(spec);
    s.error = sim.error;
    s.included = sim.stable;
  });

  std::vector<double> lx, ly;
  for (const auto& s : est.samples) {
    if (!s.included || !(s.error > 0.0)) continue;
    lx.push_back(std::log10(s.eta));
    ly.push_back(std::log10(s.error));
  }
  est.n_used = static_cast<int>(lx.size());
  if (est.n_used < 3)
    throw numerical_error("estimate_penalization_decay: fewer than 3 stable runs");

  const int n = est.n_used;
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  est.slope = sxy / sxx;
  double ss_res = 0.0;
  for (int i = 0; i < n; ++i) {
    double fit = my + est.slope * (lx[i] - mx);
    ss_res += (ly[i] - fit) * (ly[i] - fit);
  }
  est.slope_stderr = n > 2 ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
  return est;
}

}  // namespace fribm
