#ifndef SPARSEDYN_TOPOLOGY_HPP
#define SPARSEDYN_TOPOLOGY_HPP

#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace sparsedyn {

/// Binary indicator matrix marking the non-zero entries of the dynamics
/// matrix. Rows are outputs, columns are candidate regressors.
class Topology {
 public:
  Topology(Eigen::Index n_rows, Eigen::Index n_cols)
      : entries_(Eigen::MatrixXi::Zero(n_rows, n_cols)), nnz_(0) {}

  explicit Topology(const Eigen::MatrixXi& entries) : entries_(entries) {
    nnz_ = 0;
    for (Eigen::Index j = 0; j < entries_.cols(); ++j)
      for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
        if (entries_(i, j) != 0 && entries_(i, j) != 1)
          throw std::invalid_argument("Topology entries must be 0 or 1");
        nnz_ += entries_(i, j);
      }
  }

  Eigen::Index rows() const { return entries_.rows(); }
  Eigen::Index cols() const { return entries_.cols(); }
  Eigen::Index nnz() const { return nnz_; }

  int operator()(Eigen::Index i, Eigen::Index j) const {
    return entries_(i, j);
  }

  void set(Eigen::Index i, Eigen::Index j, int value) {
    if (value != 0 && value != 1)
      throw std::invalid_argument("Topology entries must be 0 or 1");
    nnz_ += value - entries_(i, j);
    entries_(i, j) = value;
  }

  void flip(Eigen::Index i, Eigen::Index j) {
    set(i, j, 1 - entries_(i, j));
  }

  Eigen::RowVectorXi row(Eigen::Index i) const { return entries_.row(i); }
  const Eigen::MatrixXi& entries() const { return entries_; }

  Eigen::Index row_nnz(Eigen::Index i) const { return entries_.row(i).sum(); }

  bool operator==(const Topology& other) const {
    return entries_ == other.entries_;
  }

 private:
  Eigen::MatrixXi entries_;
  Eigen::Index nnz_;
};

/// Indices j with row(j) == 1, ascending.
inline std::vector<Eigen::Index> active_indices(
    const Eigen::Ref<const Eigen::RowVectorXi>& row) {
  std::vector<Eigen::Index> idx;
  idx.reserve(row.size());
  for (Eigen::Index j = 0; j < row.size(); ++j)
    if (row(j) != 0) idx.push_back(j);
  return idx;
}

/// z[S_i]: entries of z at active indices, ascending.
inline Eigen::VectorXd select_vector(
    const Eigen::Ref<const Eigen::VectorXd>& z,
    const Eigen::Ref<const Eigen::RowVectorXi>& row) {
  if (z.size() != row.size())
    throw std::invalid_argument("select_vector: dimension mismatch");
  const auto idx = active_indices(row);
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out(k) = z(idx[k]);
  return out;
}

/// P[S_i]: principal submatrix of a square P on active indices.
inline Eigen::MatrixXd select_square(
    const Eigen::Ref<const Eigen::MatrixXd>& P,
    const Eigen::Ref<const Eigen::RowVectorXi>& row) {
  if (P.rows() != P.cols() || P.rows() != row.size())
    throw std::invalid_argument("select_square: dimension mismatch");
  const auto idx = active_indices(row);
  const Eigen::Index k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) out(a, b) = P(idx[a], idx[b]);
  return out;
}

/// Row restriction X[S_i] for a rectangular matrix whose rows are indexed
/// by the regressors.
inline Eigen::MatrixXd select_rows(
    const Eigen::Ref<const Eigen::MatrixXd>& X,
    const Eigen::Ref<const Eigen::RowVectorXi>& row) {
  if (X.rows() != row.size())
    throw std::invalid_argument("select_rows: dimension mismatch");
  const auto idx = active_indices(row);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), X.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(k) = X.row(idx[k]);
  return out;
}

}  // namespace sparsedyn

#endif
