#include "fribm/ibm_assembly.hpp"

#include <cmath>
#include <string>

namespace fribm {

void MeshSpec::validate() const {
  if (N < 1) throw config_error("mesh: N must be >= 1, got " + std::to_string(N));
  if (!(T > 0.0)) throw config_error("mesh: T must be > 0");
}

void PenalizationSpec::validate() const {
  if (!(eta > 0.0)) throw config_error("penalization: eta must be > 0");
  if (eta_v < 0.0) throw config_error("penalization: eta_v must be >= 0");
}

Eigen::MatrixXd GlobalOperator::real_entries() const {
  if (phase_mode != PhaseMode::UnitPhases)
    throw numerical_error("real_entries: operator was assembled with Bloch phases");
  double worst = entries.imag().cwiseAbs().maxCoeff();
  if (worst > 1e-12 * (1.0 + entries.real().cwiseAbs().maxCoeff()))
    throw numerical_error("real_entries: unexpected imaginary residue " + std::to_string(worst));
  return entries.real();
}

Eigen::VectorXd global_points(const MeshSpec& mesh, const NodeSet& nodes) {
  mesh.validate();
  const int p1 = static_cast<int>(nodes.nodes.size());
  const double h = mesh.h();
  Eigen::VectorXd x(mesh.N * p1);
  for (int n = 0; n < mesh.N; ++n) {
    double xl = -mesh.T + n * h;
    for (int i = 0; i < p1; ++i) x[n * p1 + i] = xl + 0.5 * (nodes.nodes[i] + 1.0) * h;
  }
  return x;
}

MaskSpec build_mask(const MeshSpec& mesh, int Z, const NodeSet& nodes) {
  mesh.validate();
  if (Z < 0 || Z >= mesh.N)
    throw config_error("build_mask: Z must satisfy 0 <= Z < N, got Z = " + std::to_string(Z) +
                       ", N = " + std::to_string(mesh.N));
  if (Z > 0 && mesh.N % 2 != 0)
    throw config_error("build_mask: solid boundaries must coincide with element interfaces; "
                       "N must be even when Z > 0");

  const int p1 = static_cast<int>(nodes.nodes.size());
  MaskSpec mask;
  mask.Z = Z;
  mask.r = static_cast<double>(Z) / mesh.N;
  mask.chi = Eigen::ArrayXi::Zero(mesh.N * p1);

  const int first = mesh.N / 2;  // element whose left face is x = 0
  for (int j = 0; j < Z; ++j) {
    int n = (first + j) % mesh.N;
    mask.chi.segment(n * p1, p1).setOnes();
  }
  return mask;
}

namespace {

struct BlockTriplet {
  Eigen::MatrixXd left, middle, right;
};

// Places the triplet on the block diagonals with periodic corner blocks
// scaled by the ghost factors exp(-+2ikT) (Bloch) or one (unit).
Eigen::MatrixXcd assemble_block_periodic(const BlockTriplet& b, const MeshSpec& mesh,
                                         PhaseMode phase_mode, double k) {
  const int p1 = static_cast<int>(b.middle.rows());
  const int n = mesh.N;
  const int dim = n * p1;
  Complex phase_l(1.0, 0.0), phase_r(1.0, 0.0);
  if (phase_mode == PhaseMode::BlochPhases) {
    phase_l = std::exp(Complex(0.0, -2.0 * k * mesh.T));
    phase_r = std::exp(Complex(0.0, 2.0 * k * mesh.T));
  }

  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
  for (int e = 0; e < n; ++e) {
    M.block(e * p1, e * p1, p1, p1) = b.middle.cast<Complex>();
    if (n == 1) {
      // left and right neighbor are the element itself, each with its phase
      M.block(0, 0, p1, p1) += phase_l * b.left.cast<Complex>() + phase_r * b.right.cast<Complex>();
      continue;
    }
    const int prev = (e + n - 1) % n;
    const int next = (e + 1) % n;
    Complex fl = (e == 0) ? phase_l : Complex(1.0, 0.0);
    Complex fr = (e == n - 1) ? phase_r : Complex(1.0, 0.0);
    M.block(e * p1, prev * p1, p1, p1) += fl * b.left.cast<Complex>();
    M.block(e * p1, next * p1, p1, p1) += fr * b.right.cast<Complex>();
  }
  return M;
}

}  // namespace

Eigen::MatrixXcd assemble_ldg_second_derivative(const FRConfig& cfg, const MeshSpec& mesh,
                                                PhaseMode phase_mode, double k,
                                                double beta, double tau) {
  cfg.validate();
  mesh.validate();
  const double h = mesh.h();
  NodeSet nodes = gauss_nodes(cfg.P);
  const Eigen::MatrixXd D = diff_matrix(nodes);
  auto [l_left, l_right] = boundary_interpolation(nodes);
  auto [gl, gr] = radau_correction_derivatives(cfg.P, nodes);
  const double s = 2.0 / h;

  // Jumps are oriented across the interface left-to-right,
  // [a] = a_right - a_left. beta = 1/2 then takes u_hat from the upwind
  // (left) trace and q_hat from the downwind trace, alternating.

  // Gradient sweep: q = dx(u) with u_hat = {u} - beta*[u].
  BlockTriplet grad;
  grad.left = s * gl * ((0.5 + beta) * l_right);
  grad.middle = s * (D - gl * ((0.5 + beta) * l_left) + gr * ((beta - 0.5) * l_right));
  grad.right = s * gr * ((0.5 - beta) * l_left);

  // Divergence sweep applied to q: q_hat = {q} + beta*[q].
  BlockTriplet div;
  div.left = s * gl * ((0.5 - beta) * l_right);
  div.middle = s * (D + gl * ((beta - 0.5) * l_left) - gr * ((0.5 + beta) * l_right));
  div.right = s * gr * ((0.5 + beta) * l_left);

  // Interface penalty -(tau/h)*[u] entering through q_hat.
  BlockTriplet pen;
  pen.left = (s * tau / h) * gl * l_right;
  pen.middle = -(s * tau / h) * (gl * l_left - gr * l_right);
  pen.right = -(s * tau / h) * gr * l_left;

  Eigen::MatrixXcd G = assemble_block_periodic(grad, mesh, phase_mode, k);
  Eigen::MatrixXcd Q = assemble_block_periodic(div, mesh, phase_mode, k);
  Eigen::MatrixXcd Pen = assemble_block_periodic(pen, mesh, phase_mode, k);
  return Q * G + Pen;
}

GlobalOperator assemble_semi_discrete(double k, const FRConfig& cfg, const MeshSpec& mesh,
                                      const MaskSpec& mask, const PenalizationSpec& pen,
                                      PhaseMode phase_mode) {
  cfg.validate();
  mesh.validate();
  pen.validate();

  LocalOperators ops = local_operators(cfg, mesh.h());
  const int p1 = cfg.P + 1;
  const int dim = mesh.N * p1;
  if (mask.chi.size() != dim)
    throw config_error("assemble_semi_discrete: mask has " + std::to_string(mask.chi.size()) +
                       " entries, operator needs " + std::to_string(dim));

  GlobalOperator op;
  op.k = k;
  op.phase_mode = phase_mode;
  op.cfg = cfg;
  op.mesh = mesh;
  op.mask = mask;
  op.pen = pen;
  op.entries =
      assemble_block_periodic({ops.left, ops.middle, ops.right}, mesh, phase_mode, k);

  for (int p = 0; p < dim; ++p)
    if (mask.chi[p]) op.entries(p, p) -= 1.0 / pen.eta;

  if (pen.eta_v > 0.0) {
    Eigen::MatrixXcd d2 =
        assemble_ldg_second_derivative(cfg, mesh, phase_mode, k, pen.ldg_beta, pen.ldg_tau);
    for (int p = 0; p < dim; ++p)
      if (mask.chi[p]) op.entries.row(p) += pen.eta_v * d2.row(p);
  }
  return op;
}

double solid_ratio_2d(double S_solid, double S_domain) {
  if (!(S_solid > 0.0) || !(S_domain > 0.0))
    throw config_error("solid_ratio_2d: areas must be positive");
  if (S_solid >= S_domain)
    throw config_error("solid_ratio_2d: S_solid must be smaller than S_domain");
  return std::sqrt(S_solid / S_domain);
}

}  // namespace fribm
