#ifndef SPARSEDYN_DYNAMIC_HPP
#define SPARSEDYN_DYNAMIC_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sparsedyn/basis.hpp"
#include "sparsedyn/prior.hpp"
#include "sparsedyn/record.hpp"
#include "sparsedyn/regression.hpp"
#include "sparsedyn/rng.hpp"
#include "sparsedyn/topology.hpp"

namespace sparsedyn {

/// One or more output sequences sampled with a shared period.
struct TimeSeriesSet {
  std::vector<Eigen::MatrixXd> Y;  // each n x (N_s + 1)
  double dT = 1.0;

  Eigen::Index n() const { return Y.empty() ? 0 : Y[0].rows(); }
  void validate() const;
};

/// Sufficient statistics of the fine-grid trajectories: XX = X K X^T and
/// D = X L X^T with the Ito correction q_i T/2 subtracted on the diagonal,
/// both summed over series. With output dynamics the regressor block is
/// the stacked (x, z) of width 2n.
struct DynStats {
  Eigen::MatrixXd XX;  // n_reg x n_reg
  Eigen::MatrixXd D;   // n x n_reg
};

/// Entrywise sum over series.
DynStats accumulate_multi_series(const std::vector<DynStats>& per_series);

/// Current hyperparameters of one chain.
struct HyperState {
  Eigen::VectorXd q;        // process-noise incremental variances
  Eigen::VectorXd r;        // measurement variances
  Eigen::VectorXd m;        // magnitude-scale multipliers, M_i = m_i M_0
  Eigen::VectorXd M0_diag;  // n_reg, fixed from data
  Eigen::VectorXd d;        // output-dynamics poles (<= 0), augmented only
  bool augmented = false;

  Eigen::VectorXd M_diag_row(Eigen::Index i) const { return m(i) * M0_diag; }
};

/// Exact per-step integration of dz_j = (x_j + d_j z_j) dt against a
/// piecewise-linear x on a grid with step dt.
Eigen::MatrixXd integrate_hidden_dynamics(const Eigen::MatrixXd& X, double dt,
                                          const Eigen::VectorXd& d,
                                          const Eigen::VectorXd& z0);

/// Quadratic-variation normalizer [M_0]_{kk}; with several series the
/// trapezoid weights accumulate before inversion. With output dynamics
/// the z-block scales duplicate the corresponding x scales.
Eigen::VectorXd compute_m0(const TimeSeriesSet& data, bool augmented = false);

/// Discretized Cameron-Martin functional Phi(X, S) >= 0.
double phi(const DynStats& stats, const Topology& S, const HyperState& hyper);

/// Log Metropolis-Hastings number log P(S, X): topology prior, Phi, the
/// anchor-increment term over all series, and the determinant penalties.
double log_mh_number(const DynStats& stats, const Topology& S,
                     const HyperState& hyper,
                     const std::vector<Eigen::MatrixXd>& anchors, double dT,
                     const PriorConfig& cfg);

struct DynOptions {
  bool gibbs = true;            // row-wise structure updates
  bool sample_hyper = true;
  bool output_dynamics = false;
  bool exclusive_regulators = false;  // at most one of x_j, z_j per row

  double eps_anchor = 0.2;
  double eps_traj = 0.2;
  bool adapt_eps = true;  // burn-in only, frozen afterwards
  double target_accept = 0.3;

  double beta_structure = 1.0;  // heuristic tempering exponent

  double rw_frac = 0.1;  // hyper random-walk width relative to current value
  double q_init = 0.0, r_init = 0.0, m_init = 0.0;  // 0 => data-driven
  double pole_prior_scale = 0.0;                    // 0 => 1/dT
};

/// One MCMC chain over (S, X, hyperparameters) for the continuous-time
/// model dx = Ax dt + dw observed as y_j = x(t_j) + v_j.
class DynamicChain {
 public:
  DynamicChain(TimeSeriesSet data, Eigen::Index n_step,
               const PriorConfig& prior, const DynOptions& options,
               std::uint64_t seed, std::uint64_t stream_id = 0);

  /// One full iteration: structure update (joint or row-wise Gibbs),
  /// trajectory update, output-dynamics updates, hyperparameter updates.
  /// Both exponents temper the corresponding acceptance ratios.
  void iterate(double beta_structure, double beta_trajectory);

  double log_score() const;  // log P(S, X) including the topology prior

  const Topology& topology() const { return S_; }
  const HyperState& hyper() const { return hyper_; }
  const std::vector<TrajectoryState>& trajectories() const { return traj_; }
  const DynStats& stats() const { return stats_; }
  const MeshSpec& mesh(std::size_t s) const { return meshes_[s]; }
  Eigen::Index n() const { return data_.n(); }
  Eigen::Index n_reg() const { return n_reg_; }

  long structure_proposed = 0, structure_accepted = 0;
  long trajectory_proposed = 0, trajectory_accepted = 0;
  long hyper_proposed = 0, hyper_accepted = 0;

  /// Exchange full sampler states (parallel tempering swap); proposal
  /// tuning parameters stay with the worker.
  void swap_state(DynamicChain& other);

  /// Per-row data factor log P_i(S_i, X) without the prior term.
  double row_data_factor(Eigen::Index i) const { return row_factors_(i); }

  /// Recompute everything from the current state (consistency checks).
  void refresh();

  void set_topology(const Topology& S);

  // burn-in adaptation hooks, driven by the run loop
  void set_adaptation(bool enabled) { adapting_ = enabled; }

  bool force_phi_zero = false;  // diagnostics: drop the A-dependent terms

 private:
  friend ChainRecord run_dynamic_mcmc_impl(DynamicChain&, const Schedule&,
                                           double);

  void structure_move_joint(double beta);
  void structure_move_gibbs(double beta);
  void trajectory_move(double beta);
  void pole_moves(double beta);
  void initial_z_moves(double beta);
  void hyper_move_qm(double beta);
  void hyper_move_r(double beta);

  DynStats compute_stats(const std::vector<Eigen::MatrixXd>& X_fine,
                         const std::vector<Eigen::MatrixXd>& Z_fine,
                         const Eigen::VectorXd& q) const;
  Eigen::VectorXd anchor_square_sums(
      const std::vector<Eigen::MatrixXd>& anchors) const;
  double row_factor(Eigen::Index i, const DynStats& stats,
                    const Eigen::VectorXd& anchor_ss,
                    const Eigen::VectorXd& q, const Eigen::VectorXd& m) const;
  Eigen::VectorXd all_row_factors(const DynStats& stats,
                                  const Eigen::VectorXd& anchor_ss,
                                  const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& m) const;
  double row_log_prior(const Eigen::Ref<const Eigen::RowVectorXi>& row) const;
  Eigen::MatrixXd integrate_hidden(const Eigen::MatrixXd& X, std::size_t s,
                                   const Eigen::VectorXd& d,
                                   const Eigen::VectorXd& z0) const;
  void adapt(double& eps, double accept);

  TimeSeriesSet data_;
  std::vector<MeshSpec> meshes_;
  std::vector<BasisMatrices> bases_;
  PriorConfig prior_;
  DynOptions opts_;
  Eigen::Index n_reg_;
  long total_intervals_ = 0;  // sum of N_s
  double horizon_total_ = 0.0;

  Topology S_;
  std::vector<TrajectoryState> traj_;
  std::vector<Eigen::MatrixXd> Z_;        // augmented only
  std::vector<Eigen::VectorXd> z0_;       // augmented only, per series
  HyperState hyper_;
  DynStats stats_;
  Eigen::VectorXd row_factors_;  // cached data factors per row
  Eigen::VectorXd anchor_ss_;    // per-row sums of squared anchor increments
  Eigen::VectorXd var_scale_;    // quadratic-variation scale per row

  RngStream rng_;
  bool adapting_ = false;
  double eps_anchor_, eps_traj_;
  Eigen::VectorXd qm_width_, r_width_;
  long traj_window_prop_ = 0, traj_window_acc_ = 0;
};

/// Plain/Gibbs/heuristic-tempering driver (single chain).
ChainRecord run_dynamic_mcmc(const TimeSeriesSet& data, Eigen::Index n_step,
                             const PriorConfig& prior, const DynOptions& opts,
                             const Schedule& schedule, std::uint64_t seed);

}  // namespace sparsedyn

#endif
