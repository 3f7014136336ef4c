// Spectral abscissa of the full simulation operator across eta_v.
#include <cstdio>
#include <cmath>
#include <Eigen/Eigenvalues>
#include "fribm/ibm_assembly.hpp"
#include "fribm/timedomain.hpp"

using namespace fribm;

int main() {
  FRConfig cfg;
  MeshSpec mesh{1.0, 40};
  NodeSet nodes = gauss_nodes(3);
  MaskSpec mask = build_mask(mesh, 1, nodes);
  for (double eta : {1e-3, 1e-4}) {
    for (double etav : {0.0, 1e-2, 5e-2, 1e-1, 2e-1, 5e-1, 1.0}) {
      PenalizationSpec pen;
      pen.eta = eta;
      pen.eta_v = etav;
      GlobalOperator op = assemble_semi_discrete(0.0, cfg, mesh, mask, pen, PhaseMode::UnitPhases);
      Eigen::EigenSolver<Eigen::MatrixXd> es(op.real_entries(), false);
      double max_re = -1e300, min_re = 1e300;
      for (int i = 0; i < es.eigenvalues().size(); ++i) {
        max_re = std::max(max_re, es.eigenvalues()[i].real());
        min_re = std::min(min_re, es.eigenvalues()[i].real());
      }
      double dtc = spectral_critical_dt(es.eigenvalues());
      printf("eta=%.0e eta_v=%6.2g  max Re = %+.6e  min Re = %.3e  dt_spec = %.3e\n", eta, etav,
             max_re, min_re, dtc);
    }
  }
  return 0;
}
