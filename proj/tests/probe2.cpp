// Spectrum inspection around the primary-mode identification question.
#include <cstdio>
#include <cmath>

#include "fribm/ibm_assembly.hpp"
#include "fribm/spectral.hpp"

using namespace fribm;

static void dump(int N, double eta, double x_norm) {
  FRConfig cfg;  // P=3 upwind
  MeshSpec mesh{1.0, N};
  NodeSet nodes = gauss_nodes(3);
  MaskSpec mask = build_mask(mesh, 1, nodes);
  PenalizationSpec pen;
  pen.eta = eta;
  const double k = x_norm * 4.0 / mesh.h();
  GlobalOperator op = assemble_semi_discrete(k, cfg, mesh, mask, pen, PhaseMode::BlochPhases);
  EigResult eig = eig_dense(op.entries);
  const double khat = k / (1.0 - mask.r);
  const double kshifted = (k + M_PI / (N * mesh.h())) / (1.0 - mask.r);
  printf("\nN=%d eta=%.0e k=%.4f khat=%.4f shifted khat=%.4f ; fluid modes (Re>-0.2/eta):\n", N,
         eta, k, khat, kshifted);
  for (int m = 0; m < eig.values.size(); ++m) {
    Complex lam = eig.values[m];
    if (lam.real() < -0.2 / eta) continue;
    double re_kstar = -lam.imag();
    if (std::abs(re_kstar) > 12.0) continue;
    printf("  lam = %10.4f %+10.4fi    Re k* = %9.4f  Im k* = %9.4f\n", lam.real(), lam.imag(),
           re_kstar, lam.real());
  }
}

int main() {
  dump(10, 1e-4, 0.005);
  dump(40, 1e-4, 0.005);
  dump(40, 1e-3, 0.005);
  dump(40, 1e-5, 0.005);
  dump(40, 1e-2, 0.005);   // weaker penalty
  dump(40, 1.0, 0.005);    // very weak penalty
  return 0;
}
