#include "sparsedyn/basis.hpp"

#include <cmath>

namespace sparsedyn {

BasisMatrices build_basis(const MeshSpec& mesh) {
  mesh.validate();
  const Eigen::Index nodes = mesh.fine_nodes();
  const double dt = mesh.fine_dt();

  BasisMatrices basis;
  basis.K = Eigen::MatrixXd::Zero(nodes, nodes);
  basis.L = Eigen::MatrixXd::Zero(nodes, nodes);
  for (Eigen::Index i = 0; i < nodes; ++i) {
    const bool first = (i == 0), last = (i == nodes - 1);
    basis.K(i, i) = dt / 6.0 * ((first || last) ? 2.0 : 4.0);
    if (!last) {
      basis.K(i, i + 1) = dt / 6.0;
      basis.K(i + 1, i) = dt / 6.0;
      basis.L(i, i + 1) = -0.5;
      basis.L(i + 1, i) = 0.5;
    }
    if (first) basis.L(i, i) = -0.5;
    if (last) basis.L(i, i) = 0.5;
  }

  // rows of P_emb are coarse hat functions sampled at fine nodes
  basis.P_emb = Eigen::MatrixXd::Zero(mesh.coarse_nodes(), nodes);
  for (Eigen::Index j = 0; j < mesh.coarse_nodes(); ++j) {
    for (Eigen::Index k = 0; k < nodes; ++k) {
      const double rel =
          std::abs(double(k) - double(j) * double(mesh.n_step)) /
          double(mesh.n_step);
      if (rel < 1.0) basis.P_emb(j, k) = 1.0 - rel;
    }
  }

  // Sine modes of the bridge on one interval. Column j is scaled by the
  // square root of the discrete bridge eigenvalue dt / (4 sin^2(pi j/2n)),
  // which makes the expansion exact on the fine grid; the scaling tends
  // to sqrt(2 dT)/(pi j) as n_step grows.
  const Eigen::Index interior = mesh.n_step - 1;
  basis.P_b = Eigen::MatrixXd::Zero(interior, interior);
  for (Eigen::Index j = 1; j <= interior; ++j) {
    const double angle = M_PI * double(j) / (2.0 * double(mesh.n_step));
    const double scale =
        std::sqrt(2.0 * dt / double(mesh.n_step)) / (2.0 * std::sin(angle));
    for (Eigen::Index k = 1; k <= interior; ++k)
      basis.P_b(k - 1, j - 1) =
          scale * std::sin(M_PI * double(k) * double(j) / double(mesh.n_step));
  }
  return basis;
}

Eigen::MatrixXd sample_bridge(const MeshSpec& mesh,
                              const BasisMatrices& basis,
                              const Eigen::VectorXd& Q_diag, RngStream& rng) {
  if ((Q_diag.array() <= 0.0).any())
    throw std::invalid_argument("sample_bridge: process variances must be positive");
  const Eigen::Index n = Q_diag.size();
  const Eigen::Index interior = mesh.n_step - 1;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, mesh.fine_nodes());
  const Eigen::VectorXd sq = Q_diag.array().sqrt();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < mesh.N; ++j) {
      const Eigen::VectorXd values = basis.P_b * rng.normal_vector(interior);
      B.block(i, j * mesh.n_step + 1, 1, interior) =
          sq(i) * values.transpose();
    }
  }
  return B;
}

Eigen::MatrixXd cn_propose_anchor(const Eigen::MatrixXd& Y_data,
                                  const Eigen::MatrixXd& Y_curr,
                                  const Eigen::VectorXd& R_diag, double eps,
                                  RngStream& rng) {
  if (!(eps > 0.0 && eps <= 1.0))
    throw std::invalid_argument("cn_propose_anchor: eps must be in (0,1]");
  const double keep = std::sqrt(1.0 - eps * eps);
  const Eigen::MatrixXd noise =
      R_diag.array().sqrt().matrix().asDiagonal() *
      rng.normal_matrix(Y_data.rows(), Y_data.cols());
  return Y_data + keep * (Y_curr - Y_data) + eps * noise;
}

Eigen::MatrixXd cn_propose_trajectory(const Eigen::MatrixXd& Y_hat,
                                      const Eigen::MatrixXd& Y_curr,
                                      const Eigen::MatrixXd& X_curr,
                                      double eps, const BasisMatrices& basis,
                                      const Eigen::MatrixXd& bridge) {
  if (!(eps > 0.0 && eps <= 1.0))
    throw std::invalid_argument("cn_propose_trajectory: eps must be in (0,1]");
  const double keep = std::sqrt(1.0 - eps * eps);
  return (Y_hat - keep * Y_curr) * basis.P_emb + keep * X_curr + eps * bridge;
}

double lemma1_log_ratio(const Eigen::MatrixXd& X_curr,
                        const Eigen::MatrixXd& Y_hat, const MeshSpec& mesh,
                        const Eigen::VectorXd& Q_diag) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < X_curr.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < mesh.N; ++j) {
      const double cur = X_curr(i, mesh.coarse_to_fine(j + 1)) -
                         X_curr(i, mesh.coarse_to_fine(j));
      const double prop = Y_hat(i, j + 1) - Y_hat(i, j);
      sum += cur * cur - prop * prop;
    }
    total += sum / (2.0 * Q_diag(i) * mesh.dT);
  }
  return total;
}

}  // namespace sparsedyn
