#include "sparsedyn/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sparsedyn {

namespace {

std::vector<ConnectorEdge> default_connectors(const RingSpec& spec) {
  // four unit-weight edges between the first two rings, spread evenly
  if (spec.ring_sizes.size() < 2) return {};
  const int a = spec.ring_sizes[0];
  const int b = spec.ring_sizes[1];
  std::vector<ConnectorEdge> edges;
  for (int k = 0; k < 4; ++k) {
    const int na = (k * a) / 4;
    const int nb = a + (k * b) / 4;
    if (k % 2 == 0)
      edges.push_back({na, nb, spec.edge_weight});
    else
      edges.push_back({nb, na, spec.edge_weight});
  }
  return edges;
}

}  // namespace

std::pair<Eigen::MatrixXd, Topology> generate_transport_matrix(
    const RingSpec& spec) {
  const int n = spec.total_nodes();
  if (n == 0) throw std::invalid_argument("generate_transport_matrix: empty spec");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);

  const auto place = [&](int to, int from, double w) {
    if (to == from)
      throw std::invalid_argument("generate_transport_matrix: self edge");
    if (A(to, from) != 0.0)
      throw std::invalid_argument("generate_transport_matrix: overlapping edges");
    A(to, from) = w;
  };

  int offset = 0;
  for (int size : spec.ring_sizes) {
    if (size < 2)
      throw std::invalid_argument("generate_transport_matrix: ring size < 2");
    for (int k = 0; k < size; ++k)
      place(offset + (k + 1) % size, offset + k, spec.edge_weight);
    offset += size;
  }
  const auto connectors =
      spec.connectors.empty() ? default_connectors(spec) : spec.connectors;
  for (const auto& edge : connectors) place(edge.to, edge.from, edge.weight);

  Eigen::MatrixXi indicator = Eigen::MatrixXi::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) indicator(i, j) = A(i, j) != 0.0 ? 1 : 0;

  if (spec.column_zero_sum) {
    for (int j = 0; j < n; ++j) {
      A(j, j) = -A.col(j).sum();
      if (A(j, j) != 0.0) indicator(j, j) = 1;
    }
  }
  return {A, Topology(indicator)};
}

SimResult simulate_series(const Eigen::MatrixXd& A, const NoiseSpec& noise,
                          double T, double dT, double fine_dt, RngStream& rng) {
  if (!(fine_dt > 0.0 && dT > 0.0 && T >= dT))
    throw std::invalid_argument("simulate_series: bad time parameters");
  const Eigen::Index n = A.rows();
  const long per_sample = std::max<long>(1, std::lround(dT / fine_dt));
  const double dt = dT / double(per_sample);
  const long N = std::lround(T / dT);
  const long steps = N * per_sample;

  SimResult result;
  result.traj_dt = dt;
  result.trajectory.resize(n, steps + 1);
  result.Y.resize(n, N + 1);
  result.times.resize(N + 1);

  Eigen::VectorXd x = noise.init_sd * rng.normal_vector(n);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  const double noise_scale = std::sqrt(noise.ou_incr_cov * dt);

  result.trajectory.col(0) = x;
  result.Y.col(0) = x + noise.meas_sd * rng.normal_vector(n);
  result.times(0) = 0.0;

  for (long k = 1; k <= steps; ++k) {
    const Eigen::VectorXd du =
        -noise.ou_theta * u * dt + noise_scale * rng.normal_vector(n);
    x += A * x * dt + du;
    u += du;
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > 1e12)
      throw std::runtime_error(
          "simulate_series: state overflow, reduce fine_dt");
    result.trajectory.col(k) = x;
    if (k % per_sample == 0) {
      const long j = k / per_sample;
      result.Y.col(j) = x + noise.meas_sd * rng.normal_vector(n);
      result.times(j) = double(j) * dT;
    }
  }
  return result;
}

std::pair<double, double> score_auroc_auprec(const Eigen::MatrixXd& scores,
                                             const Topology& truth) {
  const ScoreCurves c = score_curves(scores, truth);
  return {c.auroc, c.auprec};
}

ScoreCurves score_curves(const Eigen::MatrixXd& scores, const Topology& truth) {
  if (scores.rows() != truth.rows() || scores.cols() != truth.cols())
    throw std::invalid_argument("score_auroc_auprec: shape mismatch");
  if (!scores.allFinite())
    throw std::invalid_argument("score_auroc_auprec: non-finite scores");

  const Eigen::Index total = scores.size();
  std::vector<std::pair<double, int>> instances;
  instances.reserve(total);
  long positives = 0;
  for (Eigen::Index i = 0; i < scores.rows(); ++i)
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
      instances.emplace_back(scores(i, j), truth(i, j));
      positives += truth(i, j);
    }
  const long negatives = total - positives;
  if (positives == 0 || negatives == 0)
    throw std::invalid_argument(
        "score_auroc_auprec: degenerate truth (need both classes)");

  std::sort(instances.begin(), instances.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  ScoreCurves out;
  double& auroc = out.auroc;
  double& auprec = out.auprec;
  out.roc.emplace_back(0.0, 0.0);
  long tp = 0, fp = 0;
  double prev_recall = 0.0;
  std::size_t k = 0;
  while (k < instances.size()) {
    // group equal scores into one threshold step
    std::size_t group_end = k;
    long group_tp = 0, group_fp = 0;
    while (group_end < instances.size() &&
           instances[group_end].first == instances[k].first) {
      group_tp += instances[group_end].second;
      group_fp += 1 - instances[group_end].second;
      ++group_end;
    }
    const double tpr0 = double(tp) / positives;
    const double fpr0 = double(fp) / negatives;
    tp += group_tp;
    fp += group_fp;
    const double tpr1 = double(tp) / positives;
    const double fpr1 = double(fp) / negatives;
    auroc += (fpr1 - fpr0) * 0.5 * (tpr0 + tpr1);
    out.roc.emplace_back(fpr1, tpr1);

    const double recall = tpr1;
    const double precision = double(tp) / double(tp + fp);
    auprec += (recall - prev_recall) * precision;  // step interpolation
    out.pr.emplace_back(recall, precision);
    prev_recall = recall;
    k = group_end;
  }
  return out;
}

Confusion confusion_at_threshold(const Eigen::MatrixXd& scores,
                                 const Topology& truth, double threshold) {
  Confusion c;
  for (Eigen::Index i = 0; i < scores.rows(); ++i)
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
      const bool predicted = scores(i, j) > threshold;
      const bool actual = truth(i, j) == 1;
      if (predicted && actual) ++c.tp;
      else if (predicted) ++c.fp;
      else if (actual) ++c.fn;
      else ++c.tn;
    }
  return c;
}

PosteriorTable enumerate_posterior(const RegressionData& data,
                                   const PriorConfig& cfg) {
  data.validate();
  const Eigen::Index m = data.m(), n = data.n();
  if (m * n > 16)
    throw std::invalid_argument("enumerate_posterior: m*n exceeds the 2^16 bound");
  const GramCache cache = GramCache::build(data);
  const std::uint32_t count = 1u << (m * n);

  std::vector<double> log_scores(count);
  double max_log = -std::numeric_limits<double>::infinity();
  PosteriorTable table;
  table.entries.reserve(count);
  for (std::uint32_t bits = 0; bits < count; ++bits) {
    Eigen::MatrixXi S(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        S(i, j) = (bits >> (i * n + j)) & 1u;
    const Topology topo(S);
    log_scores[bits] = log_marginal(data, cache, topo, cfg);
    max_log = std::max(max_log, log_scores[bits]);
    table.entries.emplace_back(std::move(S), 0.0);
  }
  double norm = 0.0;
  for (double v : log_scores) norm += std::exp(v - max_log);

  table.edge_marginals = Eigen::MatrixXd::Zero(m, n);
  for (std::uint32_t bits = 0; bits < count; ++bits) {
    const double p = std::exp(log_scores[bits] - max_log) / norm;
    table.entries[bits].second = p;
    table.edge_marginals += p * table.entries[bits].first.cast<double>();
  }
  return table;
}

}  // namespace sparsedyn
