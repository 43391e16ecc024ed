#ifndef SPARSEDYN_RECORD_HPP
#define SPARSEDYN_RECORD_HPP

#include <vector>

#include <Eigen/Dense>

namespace sparsedyn {

struct TopologySample {
  long iteration = 0;
  Eigen::MatrixXi S;
  double log_score = 0.0;
  Eigen::VectorXd q, r, m;  // empty when hyperparameters are fixed
  double beta = 1.0;        // inverse temperature the sample was drawn at
};

/// Thinned posterior samples plus running summaries for one chain.
struct ChainRecord {
  std::vector<TopologySample> samples;

  Eigen::MatrixXd edge_accumulator;  // sum of retained S
  long n_retained = 0;

  long structure_proposed = 0, structure_accepted = 0;
  long trajectory_proposed = 0, trajectory_accepted = 0;
  long hyper_proposed = 0, hyper_accepted = 0;

  // posterior-mean fine-grid trajectory, one matrix per series
  std::vector<Eigen::MatrixXd> trajectory_mean;

  // per-adjacent-pair swap acceptance (parallel tempering only)
  std::vector<long> swap_attempted, swap_accepted;

  Eigen::MatrixXd edge_probabilities() const {
    if (n_retained == 0) return edge_accumulator;
    return edge_accumulator / static_cast<double>(n_retained);
  }

  double structure_accept_rate() const {
    return structure_proposed ? double(structure_accepted) / structure_proposed
                              : 0.0;
  }
  double trajectory_accept_rate() const {
    return trajectory_proposed
               ? double(trajectory_accepted) / trajectory_proposed
               : 0.0;
  }
};

/// MCMC schedule: total retained samples, burn-in iterations, thinning.
struct Schedule {
  long n_samples = 50000;
  long burn_in = 3000;
  long thin = 10;

  long total_iterations() const { return burn_in + n_samples * thin; }
};

}  // namespace sparsedyn

#endif
