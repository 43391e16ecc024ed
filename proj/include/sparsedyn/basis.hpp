#ifndef SPARSEDYN_BASIS_HPP
#define SPARSEDYN_BASIS_HPP

#include <stdexcept>

#include <Eigen/Dense>

#include "sparsedyn/rng.hpp"

namespace sparsedyn {

/// Fine time mesh refining the sampling grid: N sampling intervals of
/// length dT, each split into n_step fine steps of length dT/n_step.
struct MeshSpec {
  Eigen::Index N = 0;       // sampling intervals
  double dT = 1.0;          // sampling period
  Eigen::Index n_step = 4;  // fine subdivisions per interval

  double fine_dt() const { return dT / static_cast<double>(n_step); }
  double horizon() const { return static_cast<double>(N) * dT; }
  Eigen::Index fine_nodes() const { return N * n_step + 1; }
  Eigen::Index coarse_nodes() const { return N + 1; }
  Eigen::Index coarse_to_fine(Eigen::Index j) const { return j * n_step; }

  void validate() const {
    if (N < 1 || n_step < 2 || !(dT > 0.0))
      throw std::invalid_argument("MeshSpec: need N >= 1, n_step >= 2, dT > 0");
  }
};

/// Hat-basis matrices on the fine mesh:
///   K mass matrix, L first-derivative matrix, P_emb coarse-to-fine
///   piecewise-linear embedding, P_b Karhunen-Loeve bridge factor whose
///   columns are sine modes scaled to reproduce the Brownian-bridge
///   covariance exactly on the fine grid.
struct BasisMatrices {
  Eigen::MatrixXd K;      // fine_nodes x fine_nodes
  Eigen::MatrixXd L;      // fine_nodes x fine_nodes
  Eigen::MatrixXd P_emb;  // coarse_nodes x fine_nodes
  Eigen::MatrixXd P_b;    // (n_step-1) x (n_step-1)
};

BasisMatrices build_basis(const MeshSpec& mesh);

/// Collection of independent Brownian bridges pinned to zero at every
/// coarse node; row i has incremental variance Q_diag(i).
Eigen::MatrixXd sample_bridge(const MeshSpec& mesh,
                              const BasisMatrices& basis,
                              const Eigen::VectorXd& Q_diag, RngStream& rng);

/// Crank-Nicolson autoregression on the anchor samples, targeting
/// N(Y_data, R) entrywise.
Eigen::MatrixXd cn_propose_anchor(const Eigen::MatrixXd& Y_data,
                                  const Eigen::MatrixXd& Y_curr,
                                  const Eigen::VectorXd& R_diag, double eps,
                                  RngStream& rng);

/// Crank-Nicolson update of the fine-grid trajectory; preserves the
/// coarse-node anchoring X(coarse j) = Y_hat(:, j).
Eigen::MatrixXd cn_propose_trajectory(const Eigen::MatrixXd& Y_hat,
                                      const Eigen::MatrixXd& Y_curr,
                                      const Eigen::MatrixXd& X_curr,
                                      double eps, const BasisMatrices& basis,
                                      const Eigen::MatrixXd& bridge);

/// Log acceptance ratio of the two-phase trajectory proposal against the
/// conditioned Wiener measure: sums of squared coarse increments of the
/// current trajectory minus those of the proposed anchors, over 2 q dT.
double lemma1_log_ratio(const Eigen::MatrixXd& X_curr,
                        const Eigen::MatrixXd& Y_hat, const MeshSpec& mesh,
                        const Eigen::VectorXd& Q_diag);

/// Fine-grid trajectory coefficients plus the anchor samples they
/// interpolate through.
struct TrajectoryState {
  Eigen::MatrixXd X;         // n x fine_nodes
  Eigen::MatrixXd Y_anchor;  // n x coarse_nodes
};

}  // namespace sparsedyn

#endif
