#include <chrono>
#include <cstdio>
#include <Eigen/Eigenvalues>
#include "fribm/timedomain.hpp"

using namespace fribm;
using Clock = std::chrono::steady_clock;

static double ms(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

int main() {
  FRConfig cfg;
  MeshSpec mesh{1.0, 40};
  NodeSet nodes = gauss_nodes(3);
  MaskSpec mask = build_mask(mesh, 1, nodes);
  PenalizationSpec pen;
  pen.eta = 1e-3;
  pen.eta_v = 5e-2;

  auto t0 = Clock::now();
  GlobalOperator op = assemble_semi_discrete(0.0, cfg, mesh, mask, pen, PhaseMode::UnitPhases);
  auto t1 = Clock::now();
  printf("assemble: %.1f ms\n", ms(t0, t1));

  Eigen::EigenSolver<Eigen::MatrixXd> es(op.real_entries(), false);
  auto t2 = Clock::now();
  printf("eigensolver(160, novecs): %.1f ms\n", ms(t1, t2));

  double lim = rk3_step_limit(es.eigenvalues());
  auto t3 = Clock::now();
  printf("step limit: %.3e  (%.1f ms)\n", lim, ms(t2, t3));

  SimulationSpec spec;
  spec.cfg = cfg; spec.mesh = mesh; spec.mask = mask; spec.pen = pen;
  spec.dt = 1e-4; spec.t_final = 1.1; spec.k0 = 8 * M_PI;
  SimulationResult sim = simulate(spec);
  auto t4 = Clock::now();
  printf("simulate 11000 steps: %.1f ms  err=%.4e stable=%d\n", ms(t3, t4), sim.error, sim.stable);
  return 0;
}
