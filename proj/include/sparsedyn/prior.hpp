#ifndef SPARSEDYN_PRIOR_HPP
#define SPARSEDYN_PRIOR_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "sparsedyn/topology.hpp"

namespace sparsedyn {

enum class ProposalKind { Flip, AddRemove };

/// Prior configuration shared by the regression and dynamic samplers.
/// Evaluators return log densities; defaults follow the geometric
/// topology prior p(S) = rho^{|S|_0} and weakly informative hyperpriors.
struct PriorConfig {
  double rho = 0.01;
  std::function<double(const Topology&)> topology_log_prior;

  // hyperprior evaluators, log p(.)
  std::function<double(double)> magnitude_scale_log_prior;  // p(m_i)
  std::function<double(double)> process_noise_log_prior;    // p(q_i)
  std::function<double(double)> measurement_noise_log_prior;  // p(r_i)

  ProposalKind proposal_kind = ProposalKind::Flip;
  double p_add = 0.4;
  double p_remove = 0.4;

  double log_topology_prior(const Topology& S) const {
    if (topology_log_prior) return topology_log_prior(S);
    return static_cast<double>(S.nnz()) * std::log(rho);
  }

  void validate() const {
    if (!(rho > 0.0 && rho < 1.0))
      throw std::invalid_argument("PriorConfig: rho must be in (0,1)");
    if (proposal_kind == ProposalKind::AddRemove) {
      if (!(p_add > 0.0 && p_remove > 0.0 && p_add + p_remove <= 1.0))
        throw std::invalid_argument(
            "PriorConfig: add-remove requires p1>0, p2>0, p1+p2<=1");
    }
  }
};

/// log p(x) for the scale-noninformative prior p(x) ~ 1/x on (0,inf).
inline double log_jeffreys_scale_prior(double x) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return -std::log(x);
}

/// Magnitude-scale hyperprior p(m) ~ (m/V)(20 - m/V) exp(-m/V) supported
/// on m/V in (0,20), with V a per-row quadratic-variation scale.
inline double log_magnitude_prior(double m, double var_scale) {
  const double s = m / var_scale;
  if (s <= 0.0 || s >= 20.0) return -std::numeric_limits<double>::infinity();
  return std::log(s) + std::log(20.0 - s) - s;
}

}  // namespace sparsedyn

#endif
