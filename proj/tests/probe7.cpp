// LDG variant sensitivity: alternation orientation and mask style vs
// spectral abscissa of the combined operator.
#include <cstdio>
#include <cmath>
#include <Eigen/Eigenvalues>
#include "fribm/ibm_assembly.hpp"

using namespace fribm;

static double abscissa(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  double m = -1e300;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    m = std::max(m, es.eigenvalues()[i].real());
  return m;
}

int main() {
  FRConfig cfg;
  MeshSpec mesh{1.0, 40};
  NodeSet nodes = gauss_nodes(3);
  MaskSpec mask = build_mask(mesh, 1, nodes);
  const double eta = 1e-3;

  for (double etav : {1e-2, 3e-2, 5e-2, 1e-1, 2e-1, 5e-1}) {
    PenalizationSpec pen;
    pen.eta = eta;
    // advection + penalty, no viscosity; add variants by hand
    GlobalOperator base = assemble_semi_discrete(0.0, cfg, mesh, mask, pen, PhaseMode::UnitPhases);
    Eigen::MatrixXd A = base.real_entries();
    Eigen::MatrixXd d2p =
        assemble_ldg_second_derivative(cfg, mesh, PhaseMode::UnitPhases, 0.0, 0.5, 0.1).real();
    Eigen::MatrixXd d2m =
        assemble_ldg_second_derivative(cfg, mesh, PhaseMode::UnitPhases, 0.0, -0.5, 0.1).real();

    auto rowmask = [&](const Eigen::MatrixXd& D) {
      Eigen::MatrixXd R = Eigen::MatrixXd::Zero(D.rows(), D.cols());
      for (int p = 0; p < mask.chi.size(); ++p)
        if (mask.chi[p]) R.row(p) = D.row(p);
      return R;
    };
    auto bothmask = [&](const Eigen::MatrixXd& D) {
      Eigen::MatrixXd R = Eigen::MatrixXd::Zero(D.rows(), D.cols());
      for (int p = 0; p < mask.chi.size(); ++p)
        if (mask.chi[p])
          for (int q = 0; q < mask.chi.size(); ++q)
            if (mask.chi[q]) R(p, q) = D(p, q);
      return R;
    };

    printf("etav=%6.2g  beta=+.5 row: %+9.3f | beta=-.5 row: %+9.3f | beta=+.5 both: %+9.3f | "
           "beta=-.5 both: %+9.3f\n",
           etav, abscissa(A + etav * rowmask(d2p)), abscissa(A + etav * rowmask(d2m)),
           abscissa(A + etav * bothmask(d2p)), abscissa(A + etav * bothmask(d2m)));
  }
  return 0;
}
