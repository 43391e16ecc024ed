#ifndef SPARSEDYN_REGRESSION_HPP
#define SPARSEDYN_REGRESSION_HPP

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sparsedyn/prior.hpp"
#include "sparsedyn/record.hpp"
#include "sparsedyn/rng.hpp"
#include "sparsedyn/topology.hpp"

namespace sparsedyn {

/// Static variable-selection problem y_j = A x_j + v_j with diagonal
/// measurement covariance and per-row diagonal magnitude priors M_i.
struct RegressionData {
  Eigen::MatrixXd X;       // n x N inputs
  Eigen::MatrixXd Y;       // m x N outputs
  Eigen::VectorXd R_diag;  // m, measurement variances
  Eigen::MatrixXd M_diag;  // m x n, diagonal of M_i per output row

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index m() const { return Y.rows(); }
  Eigen::Index N() const { return X.cols(); }

  void validate() const;
};

/// Sufficient statistics reused across topology evaluations.
struct GramCache {
  Eigen::MatrixXd XX;  // n x n, X X^T
  Eigen::MatrixXd XY;  // n x m, column i is X Y_i^T
  Eigen::VectorXd YY;  // m, Y_i Y_i^T

  static GramCache build(const RegressionData& data);
};

/// Minimal value of the magnitude-profile quadratic for topology S.
double j_min(const RegressionData& data, const GramCache& cache,
             const Topology& S);

/// Log marginal posterior score log p(S) - J_min - (1/2) sum of
/// log-determinant penalties; constants independent of S dropped.
double log_marginal(const RegressionData& data, const GramCache& cache,
                    const Topology& S, const PriorConfig& cfg);

/// Symmetric single-entry flip proposal; returns (S_new, log g-ratio = 0).
std::pair<Topology, double> propose_flip(const Topology& S, RngStream& rng);

/// Add/remove proposal of Section-2 form; log ratio is log g(S|S')/g(S'|S).
/// Impossible moves (add at full S, remove at empty S) propose no change.
std::pair<Topology, double> propose_add_remove(const Topology& S, double p1,
                                               double p2, RngStream& rng);

std::pair<Topology, double> propose_structure(const Topology& S,
                                              const PriorConfig& cfg,
                                              RngStream& rng);

/// Metropolis-Hastings over topologies with the closed-form marginal.
ChainRecord run_regression_mcmc(const RegressionData& data,
                                const PriorConfig& cfg,
                                const Schedule& schedule, RngStream& rng);

}  // namespace sparsedyn

#endif
