#include "sparsedyn/dynamic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sparsedyn/gaussian_marginal.hpp"

namespace sparsedyn {

void TimeSeriesSet::validate() const {
  if (Y.empty()) throw std::invalid_argument("TimeSeriesSet: no series");
  if (!(dT > 0.0)) throw std::invalid_argument("TimeSeriesSet: dT must be positive");
  for (const auto& series : Y) {
    if (series.rows() != n() || series.cols() < 2)
      throw std::invalid_argument("TimeSeriesSet: inconsistent series shapes");
    if (!series.allFinite())
      throw std::invalid_argument("TimeSeriesSet: non-finite data");
  }
}

DynStats accumulate_multi_series(const std::vector<DynStats>& per_series) {
  if (per_series.empty())
    throw std::invalid_argument("accumulate_multi_series: empty input");
  DynStats total = per_series.front();
  for (std::size_t s = 1; s < per_series.size(); ++s) {
    if (per_series[s].XX.rows() != total.XX.rows() ||
        per_series[s].D.cols() != total.D.cols())
      throw std::invalid_argument("accumulate_multi_series: dimension mismatch");
    total.XX += per_series[s].XX;
    total.D += per_series[s].D;
  }
  return total;
}

Eigen::VectorXd compute_m0(const TimeSeriesSet& data, bool augmented) {
  data.validate();
  const Eigen::Index n = data.n();
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(n);
  for (const auto& Y : data.Y) {
    const Eigen::Index N = Y.cols() - 1;
    if (N < 1) throw std::invalid_argument("compute_m0: need at least 2 samples");
    for (Eigen::Index i = 0; i < n; ++i) {
      double w = data.dT * data.dT / 4.0 * (Y(i, 0) * Y(i, 0) + Y(i, N) * Y(i, N));
      for (Eigen::Index j = 1; j < N; ++j)
        w += data.dT * data.dT * Y(i, j) * Y(i, j);
      weights(i) += w;
    }
  }
  Eigen::VectorXd m0(augmented ? 2 * n : n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (weights(i) <= 0.0)
      throw std::runtime_error("compute_m0: unscalable regulator (all-zero row " +
                               std::to_string(i) + ")");
    m0(i) = 1.0 / weights(i);
    if (augmented) m0(n + i) = 1.0 / weights(i);
  }
  return m0;
}

double phi(const DynStats& stats, const Topology& S, const HyperState& hyper) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    const double q = hyper.q(i);
    const RowFactor f = selected_row_factor(
        stats.XX, stats.D.row(i).transpose(), hyper.M_diag_row(i), q, S.row(i), i);
    total += f.quad / (2.0 * q * q);
  }
  return total;
}

double log_mh_number(const DynStats& stats, const Topology& S,
                     const HyperState& hyper,
                     const std::vector<Eigen::MatrixXd>& anchors, double dT,
                     const PriorConfig& cfg) {
  double value = cfg.log_topology_prior(S);
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    const double q = hyper.q(i);
    const RowFactor f = selected_row_factor(
        stats.XX, stats.D.row(i).transpose(), hyper.M_diag_row(i), q, S.row(i), i);
    value += f.quad / (2.0 * q * q) - 0.5 * (f.logdet_C + f.logdet_M);
    double incr = 0.0;
    for (const auto& Y_hat : anchors)
      for (Eigen::Index j = 1; j < Y_hat.cols(); ++j) {
        const double step = Y_hat(i, j) - Y_hat(i, j - 1);
        incr += step * step;
      }
    value -= incr / (2.0 * q * dT);
  }
  return value;
}

DynamicChain::DynamicChain(TimeSeriesSet data, Eigen::Index n_step,
                           const PriorConfig& prior, const DynOptions& options,
                           std::uint64_t seed, std::uint64_t stream_id)
    : data_(std::move(data)),
      prior_(prior),
      opts_(options),
      S_(0, 0),
      rng_(seed, stream_id) {
  data_.validate();
  prior_.validate();
  const Eigen::Index n = data_.n();
  n_reg_ = opts_.output_dynamics ? 2 * n : n;
  S_ = Topology(n, n_reg_);

  for (const auto& Y : data_.Y) {
    MeshSpec mesh{Y.cols() - 1, data_.dT, n_step};
    mesh.validate();
    meshes_.push_back(mesh);
    bases_.push_back(build_basis(mesh));
    total_intervals_ += mesh.N;
    horizon_total_ += mesh.horizon();
  }

  var_scale_ = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(n);
  for (const auto& Y : data_.Y)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 1; j < Y.cols(); ++j) {
        const double step = Y(i, j) - Y(i, j - 1);
        sumsq(i) += step * step;
        var_scale_(i) += step * step / data_.dT;
      }

  hyper_.augmented = opts_.output_dynamics;
  hyper_.M0_diag = compute_m0(data_, opts_.output_dynamics);
  hyper_.q.resize(n);
  hyper_.r.resize(n);
  hyper_.m.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    hyper_.q(i) = opts_.q_init > 0.0
                      ? opts_.q_init
                      : std::max(sumsq(i) / horizon_total_, 1e-8);
    hyper_.r(i) = opts_.r_init > 0.0 ? opts_.r_init : 1e-2;
    hyper_.m(i) =
        opts_.m_init > 0.0 ? opts_.m_init : std::max(var_scale_(i), 1e-8);
  }
  if (opts_.output_dynamics) {
    const double l = opts_.pole_prior_scale > 0.0 ? opts_.pole_prior_scale
                                                  : 1.0 / data_.dT;
    hyper_.d = Eigen::VectorXd::Constant(n, -l);
    for (std::size_t s = 0; s < data_.Y.size(); ++s)
      z0_.push_back(Eigen::VectorXd::Zero(n));
  }

  for (std::size_t s = 0; s < data_.Y.size(); ++s) {
    TrajectoryState t;
    t.Y_anchor = data_.Y[s];
    t.X = t.Y_anchor * bases_[s].P_emb;
    traj_.push_back(std::move(t));
  }

  eps_anchor_ = opts_.eps_anchor;
  eps_traj_ = opts_.eps_traj;
  qm_width_ = Eigen::VectorXd(2 * n);
  qm_width_.head(n) = opts_.rw_frac * hyper_.q;
  qm_width_.tail(n) = opts_.rw_frac * hyper_.m;
  r_width_ = opts_.rw_frac * hyper_.r;

  refresh();
}

Eigen::MatrixXd integrate_hidden_dynamics(const Eigen::MatrixXd& X, double dt,
                                          const Eigen::VectorXd& d,
                                          const Eigen::VectorXd& z0) {
  // dz_j = (x_j + d_j z_j) dt, exact per fine step against piecewise-linear x
  Eigen::MatrixXd Z(X.rows(), X.cols());
  for (Eigen::Index j = 0; j < X.rows(); ++j) {
    const double pole = d(j);
    Z(j, 0) = z0(j);
    double decay, int_const, int_ramp;
    if (std::abs(pole) * dt < 1e-10) {
      decay = 1.0;
      int_const = dt;
      int_ramp = dt * dt / 2.0;
    } else {
      decay = std::exp(pole * dt);
      int_const = (decay - 1.0) / pole;
      int_ramp = (int_const - dt) / pole;
    }
    for (Eigen::Index k = 1; k < X.cols(); ++k) {
      const double x0 = X(j, k - 1);
      const double slope = (X(j, k) - x0) / dt;
      Z(j, k) = decay * Z(j, k - 1) + x0 * int_const + slope * int_ramp;
    }
  }
  return Z;
}

Eigen::MatrixXd DynamicChain::integrate_hidden(const Eigen::MatrixXd& X,
                                               std::size_t s,
                                               const Eigen::VectorXd& d,
                                               const Eigen::VectorXd& z0) const {
  return integrate_hidden_dynamics(X, meshes_[s].fine_dt(), d, z0);
}

DynStats DynamicChain::compute_stats(const std::vector<Eigen::MatrixXd>& X_fine,
                                     const std::vector<Eigen::MatrixXd>& Z_fine,
                                     const Eigen::VectorXd& q) const {
  const Eigen::Index n = data_.n();
  DynStats stats;
  stats.XX = Eigen::MatrixXd::Zero(n_reg_, n_reg_);
  stats.D = Eigen::MatrixXd::Zero(n, n_reg_);
  for (std::size_t s = 0; s < X_fine.size(); ++s) {
    Eigen::MatrixXd reg;
    if (opts_.output_dynamics) {
      reg.resize(2 * n, X_fine[s].cols());
      reg.topRows(n) = X_fine[s];
      reg.bottomRows(n) = Z_fine[s];
    } else {
      reg = X_fine[s];
    }
    const Eigen::MatrixXd regK = reg * bases_[s].K;
    stats.XX += regK * reg.transpose();
    stats.D += X_fine[s] * bases_[s].L * reg.transpose();
  }
  for (Eigen::Index i = 0; i < n; ++i)
    stats.D(i, i) -= q(i) * horizon_total_ / 2.0;
  return stats;
}

Eigen::VectorXd DynamicChain::anchor_square_sums(
    const std::vector<Eigen::MatrixXd>& anchors) const {
  Eigen::VectorXd ss = Eigen::VectorXd::Zero(data_.n());
  for (const auto& Y_hat : anchors)
    for (Eigen::Index i = 0; i < Y_hat.rows(); ++i)
      for (Eigen::Index j = 1; j < Y_hat.cols(); ++j) {
        const double step = Y_hat(i, j) - Y_hat(i, j - 1);
        ss(i) += step * step;
      }
  return ss;
}

double DynamicChain::row_factor(Eigen::Index i, const DynStats& stats,
                                const Eigen::VectorXd& anchor_ss,
                                const Eigen::VectorXd& q,
                                const Eigen::VectorXd& m) const {
  const double qi = q(i);
  if (force_phi_zero) {
    // diagnostic mode: drop every A-dependent term (the quadratic Phi and
    // the magnitude-marginalization determinants) so the trajectory target
    // reduces to the Brownian bridge around the anchors
    return -anchor_ss(i) / (2.0 * qi * data_.dT);
  }
  const RowFactor f = selected_row_factor(stats.XX, stats.D.row(i).transpose(),
                                          m(i) * hyper_.M0_diag, qi, S_.row(i), i);
  return f.quad / (2.0 * qi * qi) - anchor_ss(i) / (2.0 * qi * data_.dT) -
         0.5 * (f.logdet_C + f.logdet_M);
}

Eigen::VectorXd DynamicChain::all_row_factors(const DynStats& stats,
                                              const Eigen::VectorXd& anchor_ss,
                                              const Eigen::VectorXd& q,
                                              const Eigen::VectorXd& m) const {
  Eigen::VectorXd factors(data_.n());
  for (Eigen::Index i = 0; i < data_.n(); ++i)
    factors(i) = row_factor(i, stats, anchor_ss, q, m);
  return factors;
}

double DynamicChain::row_log_prior(
    const Eigen::Ref<const Eigen::RowVectorXi>& row) const {
  if (opts_.exclusive_regulators) {
    const Eigen::Index n = data_.n();
    for (Eigen::Index j = 0; j < n; ++j)
      if (row(j) == 1 && row(n + j) == 1)
        return -std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(row.sum()) * std::log(prior_.rho);
}

void DynamicChain::refresh() {
  if (opts_.output_dynamics) {
    Z_.clear();
    for (std::size_t s = 0; s < traj_.size(); ++s)
      Z_.push_back(integrate_hidden(traj_[s].X, s, hyper_.d, z0_[s]));
  }
  std::vector<Eigen::MatrixXd> X_fine;
  std::vector<Eigen::MatrixXd> anchors;
  for (const auto& t : traj_) {
    X_fine.push_back(t.X);
    anchors.push_back(t.Y_anchor);
  }
  stats_ = compute_stats(X_fine, Z_, hyper_.q);
  anchor_ss_ = anchor_square_sums(anchors);
  row_factors_ = all_row_factors(stats_, anchor_ss_, hyper_.q, hyper_.m);
}

void DynamicChain::set_topology(const Topology& S) {
  if (S.rows() != data_.n() || S.cols() != n_reg_)
    throw std::invalid_argument("set_topology: shape mismatch");
  S_ = S;
  row_factors_ = all_row_factors(stats_, anchor_ss_, hyper_.q, hyper_.m);
}

double DynamicChain::log_score() const {
  double prior_term;
  if (prior_.topology_log_prior) {
    prior_term = prior_.topology_log_prior(S_);
  } else {
    prior_term = 0.0;
    for (Eigen::Index i = 0; i < S_.rows(); ++i)
      prior_term += row_log_prior(S_.row(i));
  }
  return prior_term + row_factors_.sum();
}

void DynamicChain::adapt(double& eps, double accept) {
  // Robbins-Monro step on log eps towards the target acceptance
  if (!adapting_) return;
  eps = std::min(1.0, std::max(1e-4, eps * std::exp(0.03 * (accept - opts_.target_accept))));
}

void DynamicChain::structure_move_joint(double beta) {
  auto [candidate, log_g_ratio] = propose_structure(S_, prior_, rng_);
  ++structure_proposed;
  // locate the changed row; at most one entry differs for both proposals
  Eigen::Index changed = -1;
  for (Eigen::Index i = 0; i < S_.rows() && changed < 0; ++i)
    if (candidate.row(i) != S_.row(i)) changed = i;
  if (changed < 0) return;  // proposal kept the state

  Topology saved = S_;
  S_ = candidate;
  const double new_factor =
      row_factor(changed, stats_, anchor_ss_, hyper_.q, hyper_.m);
  double delta = new_factor - row_factors_(changed);
  if (prior_.topology_log_prior) {
    delta += prior_.topology_log_prior(S_) - prior_.topology_log_prior(saved);
  } else {
    delta += row_log_prior(S_.row(changed)) - row_log_prior(saved.row(changed));
  }
  if (std::log(rng_.uniform()) < beta * delta + log_g_ratio) {
    row_factors_(changed) = new_factor;
    ++structure_accepted;
  } else {
    S_ = std::move(saved);
  }
}

void DynamicChain::structure_move_gibbs(double beta) {
  if (prior_.topology_log_prior)
    throw std::runtime_error(
        "structure_move_gibbs: row-wise updates require a row-factorizable "
        "topology prior; custom joint priors are not supported");
  for (Eigen::Index i = 0; i < S_.rows(); ++i) {
    const Eigen::Index j = rng_.uniform_int(n_reg_);
    ++structure_proposed;
    const double old_prior = row_log_prior(S_.row(i));
    S_.flip(i, j);
    const double new_factor =
        row_factor(i, stats_, anchor_ss_, hyper_.q, hyper_.m);
    const double delta = new_factor - row_factors_(i) +
                         row_log_prior(S_.row(i)) - old_prior;
    if (std::log(rng_.uniform()) < beta * delta) {
      row_factors_(i) = new_factor;
      ++structure_accepted;
    } else {
      S_.flip(i, j);
    }
  }
}

void DynamicChain::trajectory_move(double beta) {
  std::vector<Eigen::MatrixXd> Y_new, X_new, Z_new, anchors;
  for (std::size_t s = 0; s < traj_.size(); ++s) {
    Eigen::MatrixXd Y_hat = cn_propose_anchor(data_.Y[s], traj_[s].Y_anchor,
                                              hyper_.r, eps_anchor_, rng_);
    const Eigen::MatrixXd bridge =
        sample_bridge(meshes_[s], bases_[s], hyper_.q, rng_);
    Eigen::MatrixXd X_hat = cn_propose_trajectory(
        Y_hat, traj_[s].Y_anchor, traj_[s].X, eps_traj_, bases_[s], bridge);
    if (opts_.output_dynamics)
      Z_new.push_back(integrate_hidden(X_hat, s, hyper_.d, z0_[s]));
    anchors.push_back(Y_hat);
    Y_new.push_back(std::move(Y_hat));
    X_new.push_back(std::move(X_hat));
  }
  const DynStats stats_new = compute_stats(X_new, Z_new, hyper_.q);
  const Eigen::VectorXd anchor_new = anchor_square_sums(anchors);
  const Eigen::VectorXd factors_new =
      all_row_factors(stats_new, anchor_new, hyper_.q, hyper_.m);

  ++trajectory_proposed;
  const double delta = factors_new.sum() - row_factors_.sum();
  const bool accept = std::log(rng_.uniform()) < beta * delta;
  if (accept) {
    for (std::size_t s = 0; s < traj_.size(); ++s) {
      traj_[s].Y_anchor = std::move(Y_new[s]);
      traj_[s].X = std::move(X_new[s]);
    }
    Z_ = std::move(Z_new);
    stats_ = stats_new;
    anchor_ss_ = anchor_new;
    row_factors_ = factors_new;
    ++trajectory_accepted;
  }
  adapt(eps_traj_, accept ? 1.0 : 0.0);
  if (adapting_) eps_anchor_ = eps_traj_;
}

void DynamicChain::pole_moves(double beta) {
  const double l = opts_.pole_prior_scale > 0.0 ? opts_.pole_prior_scale
                                                : 1.0 / data_.dT;
  for (Eigen::Index j = 0; j < data_.n(); ++j) {
    ++hyper_proposed;
    const double cand = hyper_.d(j) + 0.2 * l * rng_.normal();
    if (cand > 0.0) continue;  // prior support is the negative half line
    Eigen::VectorXd d_new = hyper_.d;
    d_new(j) = cand;
    std::vector<Eigen::MatrixXd> Z_new, X_fine;
    for (std::size_t s = 0; s < traj_.size(); ++s) {
      Z_new.push_back(integrate_hidden(traj_[s].X, s, d_new, z0_[s]));
      X_fine.push_back(traj_[s].X);
    }
    const DynStats stats_new = compute_stats(X_fine, Z_new, hyper_.q);
    const Eigen::VectorXd factors_new =
        all_row_factors(stats_new, anchor_ss_, hyper_.q, hyper_.m);
    const double delta = factors_new.sum() - row_factors_.sum() +
                         (cand - hyper_.d(j)) / l;
    if (std::log(rng_.uniform()) < beta * delta) {
      hyper_.d = d_new;
      Z_ = std::move(Z_new);
      stats_ = stats_new;
      row_factors_ = factors_new;
      ++hyper_accepted;
    }
  }
}

void DynamicChain::initial_z_moves(double beta) {
  for (std::size_t s = 0; s < traj_.size(); ++s) {
    for (Eigen::Index j = 0; j < data_.n(); ++j) {
      ++hyper_proposed;
      Eigen::VectorXd z0_new = z0_[s];
      z0_new(j) += 0.2 * (1.0 + std::abs(z0_new(j))) * rng_.normal();
      std::vector<Eigen::MatrixXd> Z_new = Z_, X_fine;
      Z_new[s] = integrate_hidden(traj_[s].X, s, hyper_.d, z0_new);
      for (const auto& t : traj_) X_fine.push_back(t.X);
      const DynStats stats_new = compute_stats(X_fine, Z_new, hyper_.q);
      const Eigen::VectorXd factors_new =
          all_row_factors(stats_new, anchor_ss_, hyper_.q, hyper_.m);
      const double delta = factors_new.sum() - row_factors_.sum();
      if (std::log(rng_.uniform()) < beta * delta) {
        z0_[s] = z0_new;
        Z_ = std::move(Z_new);
        stats_ = stats_new;
        row_factors_ = factors_new;
        ++hyper_accepted;
      }
    }
  }
}

void DynamicChain::hyper_move_qm(double beta) {
  const Eigen::Index n = data_.n();

  // magnitude scales: cheap per-row moves
  for (Eigen::Index i = 0; i < n; ++i) {
    ++hyper_proposed;
    const double cand = hyper_.m(i) + qm_width_(n + i) * rng_.normal();
    bool accept = false;
    if (cand > 0.0) {
      Eigen::VectorXd m_new = hyper_.m;
      m_new(i) = cand;
      const double new_factor =
          row_factor(i, stats_, anchor_ss_, hyper_.q, m_new);
      double delta = new_factor - row_factors_(i);
      const auto& prior_m = prior_.magnitude_scale_log_prior;
      delta += prior_m ? prior_m(cand) - prior_m(hyper_.m(i))
                       : log_magnitude_prior(cand, var_scale_(i)) -
                             log_magnitude_prior(hyper_.m(i), var_scale_(i));
      if (std::isfinite(delta) && std::log(rng_.uniform()) < beta * delta) {
        hyper_.m = m_new;
        row_factors_(i) = new_factor;
        ++hyper_accepted;
        accept = true;
      }
    }
    if (adapting_)
      qm_width_(n + i) *= std::exp(0.05 * ((accept ? 1.0 : 0.0) - opts_.target_accept));
  }

  // one process-noise component per iteration; the bridge part of every
  // trajectory row is rescaled along with the proposal
  const Eigen::Index i = rng_.uniform_int(n);
  ++hyper_proposed;
  const double cand = hyper_.q(i) + qm_width_(i) * rng_.normal();
  bool accept = false;
  if (cand > 0.0) {
    Eigen::VectorXd q_new = hyper_.q;
    q_new(i) = cand;
    const double scale = std::sqrt(cand / hyper_.q(i));
    std::vector<Eigen::MatrixXd> X_new, Z_new;
    for (std::size_t s = 0; s < traj_.size(); ++s) {
      const Eigen::MatrixXd interp = traj_[s].Y_anchor * bases_[s].P_emb;
      Eigen::MatrixXd X_hat = traj_[s].X;
      X_hat.row(i) = interp.row(i) + scale * (traj_[s].X.row(i) - interp.row(i));
      if (opts_.output_dynamics)
        Z_new.push_back(integrate_hidden(X_hat, s, hyper_.d, z0_[s]));
      X_new.push_back(std::move(X_hat));
    }
    const DynStats stats_new = compute_stats(X_new, Z_new, q_new);
    const Eigen::VectorXd factors_new =
        all_row_factors(stats_new, anchor_ss_, q_new, hyper_.m);
    const auto& prior_q = prior_.process_noise_log_prior;
    double delta = factors_new.sum() - row_factors_.sum();
    delta += prior_q ? prior_q(cand) - prior_q(hyper_.q(i))
                     : log_jeffreys_scale_prior(cand) -
                           log_jeffreys_scale_prior(hyper_.q(i));
    delta += 0.5 * double(total_intervals_) * (std::log(hyper_.q(i)) - std::log(cand));
    if (std::isfinite(delta) && std::log(rng_.uniform()) < beta * delta) {
      hyper_.q = q_new;
      for (std::size_t s = 0; s < traj_.size(); ++s)
        traj_[s].X = std::move(X_new[s]);
      Z_ = std::move(Z_new);
      stats_ = stats_new;
      row_factors_ = factors_new;
      ++hyper_accepted;
      accept = true;
    }
  }
  if (adapting_)
    qm_width_(i) *= std::exp(0.05 * ((accept ? 1.0 : 0.0) - opts_.target_accept));
}

void DynamicChain::hyper_move_r(double beta) {
  const Eigen::Index n = data_.n();
  for (Eigen::Index i = 0; i < n; ++i) {
    ++hyper_proposed;
    const double cand = hyper_.r(i) + r_width_(i) * rng_.normal();
    bool accept = false;
    if (cand > 0.0) {
      double residual = 0.0;
      double half_counts = 0.0;
      for (std::size_t s = 0; s < traj_.size(); ++s) {
        residual += (data_.Y[s].row(i) - traj_[s].Y_anchor.row(i)).squaredNorm();
        half_counts += 0.5 * double(data_.Y[s].cols());
      }
      const auto& prior_r = prior_.measurement_noise_log_prior;
      double delta = prior_r ? prior_r(cand) - prior_r(hyper_.r(i))
                             : log_jeffreys_scale_prior(cand) -
                                   log_jeffreys_scale_prior(hyper_.r(i));
      delta += half_counts * (std::log(hyper_.r(i)) - std::log(cand));
      delta += 0.5 * residual * (1.0 / hyper_.r(i) - 1.0 / cand);
      if (std::isfinite(delta) && std::log(rng_.uniform()) < beta * delta) {
        hyper_.r(i) = cand;
        ++hyper_accepted;
        accept = true;
      }
    }
    if (adapting_)
      r_width_(i) *= std::exp(0.05 * ((accept ? 1.0 : 0.0) - opts_.target_accept));
  }
}

void DynamicChain::iterate(double beta_structure, double beta_trajectory) {
  if (opts_.gibbs)
    structure_move_gibbs(beta_structure);
  else
    structure_move_joint(beta_structure);
  trajectory_move(beta_trajectory);
  if (opts_.output_dynamics) {
    pole_moves(beta_trajectory);
    initial_z_moves(beta_trajectory);
  }
  if (opts_.sample_hyper) {
    hyper_move_qm(beta_trajectory);
    hyper_move_r(beta_trajectory);
  }
}

void DynamicChain::swap_state(DynamicChain& other) {
  std::swap(S_, other.S_);
  std::swap(traj_, other.traj_);
  std::swap(Z_, other.Z_);
  std::swap(z0_, other.z0_);
  std::swap(hyper_, other.hyper_);
  std::swap(stats_, other.stats_);
  std::swap(row_factors_, other.row_factors_);
  std::swap(anchor_ss_, other.anchor_ss_);
}

ChainRecord run_dynamic_mcmc_impl(DynamicChain& chain, const Schedule& schedule,
                                  double beta_structure) {
  ChainRecord record;
  record.edge_accumulator =
      Eigen::MatrixXd::Zero(chain.n(), chain.n_reg());
  for (std::size_t s = 0; s < chain.trajectories().size(); ++s)
    record.trajectory_mean.push_back(Eigen::MatrixXd::Zero(
        chain.trajectories()[s].X.rows(), chain.trajectories()[s].X.cols()));

  const long total = schedule.total_iterations();
  for (long it = 1; it <= total; ++it) {
    if (it == schedule.burn_in + 1) chain.set_adaptation(false);
    chain.iterate(beta_structure, 1.0);
    if (it > schedule.burn_in && (it - schedule.burn_in) % schedule.thin == 0) {
      record.edge_accumulator += chain.topology().entries().cast<double>();
      for (std::size_t s = 0; s < record.trajectory_mean.size(); ++s)
        record.trajectory_mean[s] += chain.trajectories()[s].X;
      ++record.n_retained;
      record.samples.push_back({it, chain.topology().entries(),
                                chain.log_score(), chain.hyper().q,
                                chain.hyper().r, chain.hyper().m, 1.0});
    }
  }
  for (auto& mean : record.trajectory_mean)
    if (record.n_retained > 0) mean /= double(record.n_retained);

  record.structure_proposed = chain.structure_proposed;
  record.structure_accepted = chain.structure_accepted;
  record.trajectory_proposed = chain.trajectory_proposed;
  record.trajectory_accepted = chain.trajectory_accepted;
  record.hyper_proposed = chain.hyper_proposed;
  record.hyper_accepted = chain.hyper_accepted;
  return record;
}

ChainRecord run_dynamic_mcmc(const TimeSeriesSet& data, Eigen::Index n_step,
                             const PriorConfig& prior, const DynOptions& opts,
                             const Schedule& schedule, std::uint64_t seed) {
  DynamicChain chain(data, n_step, prior, opts, seed, 0);
  chain.set_adaptation(opts.adapt_eps);
  return run_dynamic_mcmc_impl(chain, schedule, opts.beta_structure);
}

}  // namespace sparsedyn
