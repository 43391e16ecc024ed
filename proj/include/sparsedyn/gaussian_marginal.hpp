#ifndef SPARSEDYN_GAUSSIAN_MARGINAL_HPP
#define SPARSEDYN_GAUSSIAN_MARGINAL_HPP

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "sparsedyn/topology.hpp"

namespace sparsedyn {

/// Per-row ingredients of the marginalized-magnitude Gaussian integral:
/// with C = M[S_i]^{-1} + G[S_i]/c,
///   quad     = b[S_i]^T C^{-1} b[S_i]
///   logdet_C = log|C|
///   logdet_M = log|M[S_i]|
/// Empty selections use the 0x0 conventions |.| = 1, quad = 0.
struct RowFactor {
  double quad = 0.0;
  double logdet_C = 0.0;
  double logdet_M = 0.0;
};

inline RowFactor selected_row_factor(
    const Eigen::Ref<const Eigen::MatrixXd>& gram,
    const Eigen::Ref<const Eigen::VectorXd>& b,
    const Eigen::Ref<const Eigen::VectorXd>& prior_diag, double c,
    const Eigen::Ref<const Eigen::RowVectorXi>& row, Eigen::Index row_index) {
  RowFactor out;
  const auto idx = active_indices(row);
  const Eigen::Index k = static_cast<Eigen::Index>(idx.size());
  if (k == 0) return out;

  Eigen::MatrixXd C(k, k);
  Eigen::VectorXd bs(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    bs(a) = b(idx[a]);
    for (Eigen::Index bcol = 0; bcol < k; ++bcol)
      C(a, bcol) = gram(idx[a], idx[bcol]) / c;
    C(a, a) += 1.0 / prior_diag(idx[a]);
    out.logdet_M += std::log(prior_diag(idx[a]));
  }

  Eigen::LLT<Eigen::MatrixXd> llt(C);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("selected_row_factor: Cholesky failed on row " +
                             std::to_string(row_index));
  const Eigen::MatrixXd& lfac = llt.matrixLLT();
  for (Eigen::Index a = 0; a < k; ++a) out.logdet_C += 2.0 * std::log(lfac(a, a));
  out.quad = bs.dot(llt.solve(bs));
  return out;
}

}  // namespace sparsedyn

#endif
