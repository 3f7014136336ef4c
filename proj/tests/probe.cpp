// Throwaway numerical probe used during bring-up; not part of the suite.
#include <cstdio>
#include <cmath>

#include "fribm/fr_elements.hpp"
#include "fribm/ibm_assembly.hpp"
#include "fribm/spectral.hpp"
#include "fribm/fully_discrete.hpp"
#include "fribm/timedomain.hpp"

using namespace fribm;

int main() {
  // 1. Nodes and local operators sanity
  for (int P : {0, 1, 3}) {
    NodeSet ns = gauss_nodes(P);
    printf("P=%d nodes:", P);
    for (int i = 0; i <= P; ++i) printf(" %.15f", ns.nodes[i]);
    printf("\n");
  }
  FRConfig cfg;  // P=3, c=1, upwind
  MeshSpec mesh{1.0, 40};
  LocalOperators ops = local_operators(cfg, mesh.h());
  printf("free-stream |(L+C+R)*1| = %.3e\n",
         ((ops.left + ops.middle + ops.right) * Eigen::VectorXd::Ones(4)).norm());

  // 2. Single-element dispersion at small kh: primary Re k* ~ k
  for (double x : {0.05, 0.1, 0.2, 0.4}) {
    double kh = x * 4.0;
    Eigen::MatrixXcd sym = single_element_symbol(ops, kh) * mesh.h();  // kh units
    EigResult eig = eig_dense(sym);
    // primary: eigenvalue closest to -i*kh
    int best = 0;
    double bd = 1e300;
    for (int m = 0; m < 4; ++m) {
      double d = std::abs(eig.values[m] - Complex(0, -kh));
      if (d < bd) { bd = d; best = m; }
    }
    double re_err = std::abs(-eig.values[best].imag() - kh);
    printf("x=%.3f  |Re k*h - kh| = %.6e   Im k*h = %.6e\n", x, re_err, eig.values[best].real());
  }

  // 3. CFL max for P=3, h=0.05
  Eigen::VectorXd kgrid = default_kgrid(cfg, mesh, 48);
  double cflmax = find_cfl_max(cfg, mesh, kgrid);
  printf("CFL(max) P=3 = %.6f  -> dt(0.1 CFLmax) = %.6e (paper: 6.5e-4)\n", cflmax,
         dt_from_cfl(0.1 * cflmax, 1.0, 3, 0.05));

  // 4. Solid modes, gamma_IBM on the fig2 case
  MeshSpec mesh10{1.0, 10};
  NodeSet nodes = gauss_nodes(3);
  MaskSpec mask10 = build_mask(mesh10, 1, nodes);
  PenalizationSpec pen;
  pen.eta = 1e-4;
  Eigen::VectorXd grid10 = default_kgrid(cfg, mesh10, 60);
  DispersionCurve curve = sweep_semi_discrete(cfg, mesh10, mask10, pen, grid10, true);
  int n_solid = 0;
  for (auto l : curve.labels) n_solid += (l == ModeLabel::Solid);
  printf("fig2: solid branches = %d, gamma_IBM = %.6e\n", n_solid, curve.gamma_ibm);

  // 5. critical eta at CFL = 0.1 CFLmax (N=40)
  MaskSpec mask40 = build_mask(mesh, 1, nodes);
  double dt01 = dt_from_cfl(0.1 * cflmax, 1.0, 3, mesh.h());
  Eigen::VectorXd coarse = default_kgrid(cfg, mesh, 16);
  CriticalEtaResult ce = find_critical_eta(cfg, mesh, mask40, dt01, coarse);
  printf("critical eta @0.1: [%.4f, %.4f] dt  fallback=%d monotone=%d\n",
         ce.eta_unstable / dt01, ce.eta_stable / dt01, ce.used_fallback, ce.monotone);

  // 6. LDG: apply to sin(pi x) and compare with -pi^2 sin(pi x)
  Eigen::MatrixXcd d2 = assemble_ldg_second_derivative(cfg, mesh, PhaseMode::UnitPhases, 0.0);
  Eigen::VectorXd xg = global_points(mesh, nodes);
  Eigen::VectorXd s = (M_PI * xg.array()).sin();
  Eigen::VectorXd got = (d2.real() * s);
  Eigen::VectorXd want = -M_PI * M_PI * s;
  printf("LDG sin: max abs err = %.3e  rel = %.3e\n", (got - want).cwiseAbs().maxCoeff(),
         (got - want).norm() / want.norm());
  // eigenvalue bound: all Real <= tiny
  EigResult d2e = eig_dense(d2);
  double max_re = -1e300, min_re = 1e300;
  for (int i = 0; i < d2e.values.size(); ++i) {
    max_re = std::max(max_re, d2e.values[i].real());
    min_re = std::min(min_re, d2e.values[i].real());
  }
  printf("LDG spectrum: max Re = %.3e, min Re = %.3e (rho ~ %.3e)\n", max_re, min_re, -min_re);

  // 7. quick simulation: fig9-like at eta=1e-3 (smaller t to keep probe fast)
  SimulationSpec spec;
  spec.cfg = cfg;
  spec.mesh = mesh;
  spec.mask = mask40;
  spec.pen.eta = 1e-3;
  spec.dt = 1e-4;
  spec.t_final = 1.1;
  spec.k0 = 10 * M_PI;  // k0 h/(P+1) = 0.3927
  SimulationResult sim = simulate(spec);
  printf("sim eta=1e-3: error=%.6e stable=%d steps=%ld\n", sim.error, sim.stable, sim.steps);
  return 0;
}
