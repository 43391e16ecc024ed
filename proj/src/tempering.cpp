#include "sparsedyn/tempering.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace sparsedyn {

void Ladder::validate() const {
  if (betas.empty() || betas.front() != 1.0)
    throw std::invalid_argument("Ladder: first inverse temperature must be 1");
  for (std::size_t j = 0; j < betas.size(); ++j) {
    if (!(betas[j] > 0.0 && betas[j] <= 1.0))
      throw std::invalid_argument("Ladder: betas must lie in (0,1]");
    if (j > 0 && !(betas[j] < betas[j - 1]))
      throw std::invalid_argument("Ladder: betas must be strictly decreasing");
  }
  if (swap_period < 1)
    throw std::invalid_argument("Ladder: swap_period must be positive");
}

bool tempered_accept(double log_p_new, double log_p_old, double beta,
                     RngStream& rng) {
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("tempered_accept: beta must be in (0,1]");
  const double log_ratio = beta * (log_p_new - log_p_old);
  if (log_ratio >= 0.0) return true;
  return std::log(rng.uniform()) < log_ratio;
}

bool attempt_swap(double log_p_j, double log_p_j1, double beta_j,
                  double beta_j1, RngStream& rng) {
  const double log_ratio = (beta_j - beta_j1) * (log_p_j1 - log_p_j);
  if (log_ratio >= 0.0) return true;
  return std::log(rng.uniform()) < log_ratio;
}

ChainRecord run_parallel_tempering(const TimeSeriesSet& data,
                                   Eigen::Index n_step,
                                   const PriorConfig& prior,
                                   const DynOptions& opts, const Ladder& ladder,
                                   const Schedule& schedule,
                                   std::uint64_t seed) {
  ladder.validate();
  const std::size_t n_chains = ladder.betas.size();

  std::vector<std::unique_ptr<DynamicChain>> chains;
  for (std::size_t k = 0; k < n_chains; ++k) {
    chains.push_back(
        std::make_unique<DynamicChain>(data, n_step, prior, opts, seed, k));
    chains[k]->set_adaptation(opts.adapt_eps);
  }
  RngStream coordinator(seed, n_chains);

  ChainRecord record;
  record.edge_accumulator =
      Eigen::MatrixXd::Zero(chains[0]->n(), chains[0]->n_reg());
  for (const auto& t : chains[0]->trajectories())
    record.trajectory_mean.push_back(
        Eigen::MatrixXd::Zero(t.X.rows(), t.X.cols()));
  record.swap_attempted.assign(n_chains > 0 ? n_chains - 1 : 0, 0);
  record.swap_accepted.assign(n_chains > 0 ? n_chains - 1 : 0, 0);

  const long total = schedule.total_iterations();
  int phase = 0;
  for (long it = 1; it <= total; ++it) {
    if (it == schedule.burn_in + 1)
      for (auto& chain : chains) chain->set_adaptation(false);

    for (std::size_t k = 0; k < n_chains; ++k) {
      const double beta = ladder.betas[k];
      chains[k]->iterate(beta * opts.beta_structure, beta);
    }

    if (n_chains > 1 && it % ladder.swap_period == 0) {
      // alternate the 1<->2, 3<->4, ... and 2<->3, 4<->5, ... pairings
      for (std::size_t j = phase; j + 1 < n_chains; j += 2) {
        ++record.swap_attempted[j];
        if (attempt_swap(chains[j]->log_score(), chains[j + 1]->log_score(),
                         ladder.betas[j], ladder.betas[j + 1], coordinator)) {
          chains[j]->swap_state(*chains[j + 1]);
          ++record.swap_accepted[j];
        }
      }
      phase = 1 - phase;
    }

    if (it > schedule.burn_in && (it - schedule.burn_in) % schedule.thin == 0) {
      const DynamicChain& cold = *chains[0];
      record.edge_accumulator += cold.topology().entries().cast<double>();
      for (std::size_t s = 0; s < record.trajectory_mean.size(); ++s)
        record.trajectory_mean[s] += cold.trajectories()[s].X;
      ++record.n_retained;
      record.samples.push_back({it, cold.topology().entries(),
                                cold.log_score(), cold.hyper().q,
                                cold.hyper().r, cold.hyper().m, 1.0});
    }
  }
  for (auto& mean : record.trajectory_mean)
    if (record.n_retained > 0) mean /= double(record.n_retained);

  record.structure_proposed = chains[0]->structure_proposed;
  record.structure_accepted = chains[0]->structure_accepted;
  record.trajectory_proposed = chains[0]->trajectory_proposed;
  record.trajectory_accepted = chains[0]->trajectory_accepted;
  record.hyper_proposed = chains[0]->hyper_proposed;
  record.hyper_accepted = chains[0]->hyper_accepted;
  return record;
}

ChainRecord run_heuristic_tempering(const TimeSeriesSet& data,
                                    Eigen::Index n_step,
                                    const PriorConfig& prior, DynOptions opts,
                                    double beta_struct,
                                    const Schedule& schedule,
                                    std::uint64_t seed) {
  if (!(beta_struct > 0.0 && beta_struct <= 1.0))
    throw std::invalid_argument("run_heuristic_tempering: beta must be in (0,1]");
  opts.beta_structure = beta_struct;
  return run_dynamic_mcmc(data, n_step, prior, opts, schedule, seed);
}

}  // namespace sparsedyn
