#include "sparsedyn/regression.hpp"

#include <cmath>
#include <stdexcept>

#include "sparsedyn/gaussian_marginal.hpp"

namespace sparsedyn {

void RegressionData::validate() const {
  if (X.cols() != Y.cols())
    throw std::invalid_argument("RegressionData: X and Y column counts differ");
  if (R_diag.size() != m())
    throw std::invalid_argument("RegressionData: R_diag size mismatch");
  if (M_diag.rows() != m() || M_diag.cols() != n())
    throw std::invalid_argument("RegressionData: M_diag shape mismatch");
  if ((R_diag.array() <= 0.0).any())
    throw std::invalid_argument("RegressionData: measurement variances must be positive");
  if ((M_diag.array() <= 0.0).any())
    throw std::invalid_argument("RegressionData: prior variances must be positive");
}

GramCache GramCache::build(const RegressionData& data) {
  GramCache cache;
  cache.XX = data.X * data.X.transpose();
  cache.XY = data.X * data.Y.transpose();
  cache.YY.resize(data.m());
  for (Eigen::Index i = 0; i < data.m(); ++i)
    cache.YY(i) = data.Y.row(i).squaredNorm();
  return cache;
}

double j_min(const RegressionData& data, const GramCache& cache,
             const Topology& S) {
  if (S.rows() != data.m() || S.cols() != data.n())
    throw std::invalid_argument("j_min: topology shape mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < data.m(); ++i) {
    const double r = data.R_diag(i);
    const RowFactor f = selected_row_factor(
        cache.XX, cache.XY.col(i), data.M_diag.row(i).transpose(), r, S.row(i), i);
    total += 0.5 / r * (cache.YY(i) - f.quad / r);
  }
  return total;
}

double log_marginal(const RegressionData& data, const GramCache& cache,
                    const Topology& S, const PriorConfig& cfg) {
  double value = cfg.log_topology_prior(S);
  for (Eigen::Index i = 0; i < data.m(); ++i) {
    const double r = data.R_diag(i);
    const RowFactor f = selected_row_factor(
        cache.XX, cache.XY.col(i), data.M_diag.row(i).transpose(), r, S.row(i), i);
    value -= 0.5 / r * (cache.YY(i) - f.quad / r);
    value -= 0.5 * (f.logdet_C + f.logdet_M);
  }
  return value;
}

std::pair<Topology, double> propose_flip(const Topology& S, RngStream& rng) {
  Topology next = S;
  const Eigen::Index pick = rng.uniform_int(S.rows() * S.cols());
  next.flip(pick / S.cols(), pick % S.cols());
  return {std::move(next), 0.0};
}

std::pair<Topology, double> propose_add_remove(const Topology& S, double p1,
                                               double p2, RngStream& rng) {
  const Eigen::Index total = S.rows() * S.cols();
  const Eigen::Index nnz = S.nnz();
  const double u = rng.uniform();

  const auto pick_entry = [&](int wanted) {
    const Eigen::Index count = wanted ? nnz : total - nnz;
    Eigen::Index target = rng.uniform_int(count);
    for (Eigen::Index i = 0; i < S.rows(); ++i)
      for (Eigen::Index j = 0; j < S.cols(); ++j)
        if (S(i, j) == wanted && target-- == 0) return std::pair{i, j};
    throw std::logic_error("propose_add_remove: entry scan failed");
  };

  if (u < p1) {  // addition
    if (nnz == total) return {S, 0.0};
    auto [i, j] = pick_entry(0);
    Topology next = S;
    next.set(i, j, 1);
    const double log_ratio =
        (nnz <= total - 2)
            ? std::log(p2 * double(total - nnz) / (p1 * double(nnz + 1)))
            : std::log(1.0 / (p1 * double(total)));
    return {std::move(next), log_ratio};
  }
  if (u < p1 + p2) {  // removal
    if (nnz == 0) return {S, 0.0};
    auto [i, j] = pick_entry(1);
    Topology next = S;
    next.set(i, j, 0);
    const double log_ratio =
        (nnz >= 2)
            ? std::log(p1 * double(nnz) / (p2 * double(total - nnz + 1)))
            : std::log(1.0 / (p2 * double(total)));
    return {std::move(next), log_ratio};
  }
  return {S, 0.0};
}

std::pair<Topology, double> propose_structure(const Topology& S,
                                              const PriorConfig& cfg,
                                              RngStream& rng) {
  if (cfg.proposal_kind == ProposalKind::Flip) return propose_flip(S, rng);
  return propose_add_remove(S, cfg.p_add, cfg.p_remove, rng);
}

ChainRecord run_regression_mcmc(const RegressionData& data,
                                const PriorConfig& cfg,
                                const Schedule& schedule, RngStream& rng) {
  data.validate();
  cfg.validate();
  if (schedule.n_samples <= 0)
    throw std::invalid_argument("run_regression_mcmc: n_samples must be positive");

  const GramCache cache = GramCache::build(data);
  Topology S(data.m(), data.n());
  double log_p = log_marginal(data, cache, S, cfg);

  ChainRecord record;
  record.edge_accumulator = Eigen::MatrixXd::Zero(data.m(), data.n());

  const long total = schedule.total_iterations();
  for (long it = 1; it <= total; ++it) {
    auto [candidate, log_g_ratio] = propose_structure(S, cfg, rng);
    const double log_p_new = log_marginal(data, cache, candidate, cfg);
    ++record.structure_proposed;
    if (std::log(rng.uniform()) < log_p_new - log_p + log_g_ratio) {
      S = std::move(candidate);
      log_p = log_p_new;
      ++record.structure_accepted;
    }
    if (it > schedule.burn_in && (it - schedule.burn_in) % schedule.thin == 0) {
      record.edge_accumulator += S.entries().cast<double>();
      ++record.n_retained;
      record.samples.push_back({it, S.entries(), log_p, {}, {}, {}, 1.0});
    }
  }
  return record;
}

}  // namespace sparsedyn
