#ifndef SPARSEDYN_TEMPERING_HPP
#define SPARSEDYN_TEMPERING_HPP

#include <cstdint>
#include <vector>

#include "sparsedyn/dynamic.hpp"
#include "sparsedyn/record.hpp"
#include "sparsedyn/rng.hpp"

namespace sparsedyn {

/// Inverse-temperature ladder 1 = beta_0 > beta_1 > ... > beta_h > 0.
struct Ladder {
  std::vector<double> betas{1.0};
  long swap_period = 10;

  static Ladder geometric(int count = 16, double ratio = 1.05) {
    Ladder ladder;
    ladder.betas.clear();
    double inv = 1.0;
    for (int j = 0; j < count; ++j) {
      ladder.betas.push_back(1.0 / inv);
      inv *= ratio;
    }
    return ladder;
  }

  void validate() const;
};

/// Tempered Metropolis decision: accept with min{1, exp(beta * delta)}.
bool tempered_accept(double log_p_new, double log_p_old, double beta,
                     RngStream& rng);

/// Replica-exchange decision between adjacent temperatures; returns true
/// when the full states should be exchanged.
bool attempt_swap(double log_p_low_beta_chain, double log_p_high_beta_chain,
                  double beta_j, double beta_j1, RngStream& rng);

/// Parallel tempering over DynamicChains. Chains advance in lockstep;
/// every swap_period iterations adjacent pairs are proposed for exchange,
/// alternating the even and odd pairings. Only beta = 1 samples are
/// retained.
ChainRecord run_parallel_tempering(const TimeSeriesSet& data,
                                   Eigen::Index n_step,
                                   const PriorConfig& prior,
                                   const DynOptions& opts, const Ladder& ladder,
                                   const Schedule& schedule,
                                   std::uint64_t seed);

/// Heuristic tempering: structure moves at beta_struct, trajectory and
/// hyperparameter moves at beta = 1.
ChainRecord run_heuristic_tempering(const TimeSeriesSet& data,
                                    Eigen::Index n_step,
                                    const PriorConfig& prior, DynOptions opts,
                                    double beta_struct,
                                    const Schedule& schedule,
                                    std::uint64_t seed);

}  // namespace sparsedyn

#endif
