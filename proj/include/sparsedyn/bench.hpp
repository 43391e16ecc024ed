#ifndef SPARSEDYN_BENCH_HPP
#define SPARSEDYN_BENCH_HPP

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sparsedyn/regression.hpp"
#include "sparsedyn/rng.hpp"
#include "sparsedyn/topology.hpp"

namespace sparsedyn {

struct ConnectorEdge {
  int from = 0, to = 0;
  double weight = 1.0;
};

/// Transport-ring ground truth: directed rings plus explicit inter-ring
/// connectors; diagonal entries negate the column sums.
struct RingSpec {
  std::vector<int> ring_sizes{40, 60};
  std::vector<ConnectorEdge> connectors;  // empty => 4 default connectors
  double edge_weight = 1.0;
  bool column_zero_sum = true;

  int total_nodes() const {
    int n = 0;
    for (int s : ring_sizes) n += s;
    return n;
  }
};

struct NoiseSpec {
  double ou_theta = 10.0;    // mean-reversion rate of the driver
  double ou_incr_cov = 4.0;  // incremental covariance of its Brownian part
  double meas_sd = 0.04;
  double init_sd = 2.0;
};

std::pair<Eigen::MatrixXd, Topology> generate_transport_matrix(
    const RingSpec& spec);

struct SimResult {
  Eigen::MatrixXd Y;           // n x (N+1) noisy samples
  Eigen::VectorXd times;       // N+1 sampling times
  Eigen::MatrixXd trajectory;  // true fine trajectory at steps of traj_dt
  double traj_dt = 0.0;
};

/// Euler-Maruyama simulation of dx = Ax dt + du with an OU-process driver
/// du = -theta u dt + dw per dimension.
SimResult simulate_series(const Eigen::MatrixXd& A, const NoiseSpec& noise,
                          double T, double dT, double fine_dt, RngStream& rng);

/// Threshold-sweep classifier areas over all n^2 entries; ties are
/// grouped into single threshold steps. AUPREC uses step interpolation.
std::pair<double, double> score_auroc_auprec(const Eigen::MatrixXd& scores,
                                             const Topology& truth);

/// Same sweep as score_auroc_auprec but keeps the curve vertices.
struct ScoreCurves {
  double auroc = 0.0, auprec = 0.0;
  std::vector<std::pair<double, double>> roc;  // (fpr, tpr)
  std::vector<std::pair<double, double>> pr;   // (recall, precision)
};
ScoreCurves score_curves(const Eigen::MatrixXd& scores, const Topology& truth);

/// Confusion counts at a fixed threshold on the scores.
struct Confusion {
  long tp = 0, fp = 0, tn = 0, fn = 0;
};
Confusion confusion_at_threshold(const Eigen::MatrixXd& scores,
                                 const Topology& truth, double threshold);

struct PosteriorTable {
  std::vector<std::pair<Eigen::MatrixXi, double>> entries;  // S, p(S|X,Y)
  Eigen::MatrixXd edge_marginals;
};

/// Exact posterior over all 2^{mn} topologies (enumeration oracle).
PosteriorTable enumerate_posterior(const RegressionData& data,
                                   const PriorConfig& cfg);

}  // namespace sparsedyn

#endif
