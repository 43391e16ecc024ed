#include "sparsedyn/em_lasso.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <unsupported/Eigen/MatrixFunctions>

namespace sparsedyn {

void discretize_linear_sde(const Eigen::MatrixXd& A,
                           const Eigen::VectorXd& q_diag, double dt,
                           Eigen::MatrixXd& Ad, Eigen::MatrixXd& Qd) {
  const Eigen::Index n = A.rows();
  // van Loan block-exponential for the matched noise increment
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = -A * dt;
  block.topRightCorner(n, n) = q_diag.asDiagonal().toDenseMatrix() * dt;
  block.bottomRightCorner(n, n) = A.transpose() * dt;
  const Eigen::MatrixXd expm = block.exp();
  Ad = expm.bottomRightCorner(n, n).transpose();
  Qd = Ad * expm.topRightCorner(n, n);
  Qd = 0.5 * (Qd + Qd.transpose());
}

namespace {

struct FilterStep {
  Eigen::VectorXd mean_pred, mean_filt;
  Eigen::MatrixXd cov_pred, cov_filt;
};

}  // namespace

std::vector<Eigen::MatrixXd> e_step(const Eigen::MatrixXd& A_est,
                                    const TimeSeriesSet& data,
                                    Eigen::Index n_step,
                                    const Eigen::VectorXd& q_diag,
                                    const Eigen::VectorXd& r_diag,
                                    const EmOptions& opts) {
  if (!A_est.allFinite()) throw std::invalid_argument("e_step: non-finite A");
  data.validate();
  const Eigen::Index n = data.n();
  const double dt = data.dT / double(n_step);

  Eigen::MatrixXd Ad, Qd;
  discretize_linear_sde(A_est, q_diag, dt, Ad, Qd);
  const Eigen::MatrixXd R = r_diag.asDiagonal();

  std::vector<Eigen::MatrixXd> smoothed;
  for (const auto& Y : data.Y) {
    const Eigen::Index N = Y.cols() - 1;
    const Eigen::Index nodes = N * n_step + 1;
    std::vector<FilterStep> steps(nodes);

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd cov = opts.init_var * Eigen::MatrixXd::Identity(n, n);

    const auto measurement_update = [&](Eigen::Index coarse,
                                        Eigen::VectorXd& m_io,
                                        Eigen::MatrixXd& P_io) {
      const Eigen::MatrixXd innov_cov = P_io + R;
      Eigen::LLT<Eigen::MatrixXd> llt(innov_cov);
      if (llt.info() != Eigen::Success)
        throw std::runtime_error("e_step: filter covariance lost positive definiteness");
      const Eigen::MatrixXd gain = llt.solve(P_io).transpose();
      m_io += gain * (Y.col(coarse) - m_io);
      P_io -= gain * P_io;
      P_io = 0.5 * (P_io + P_io.transpose());
    };

    for (Eigen::Index k = 0; k < nodes; ++k) {
      if (k > 0) {
        mean = Ad * mean;
        cov = Ad * cov * Ad.transpose() + Qd;
      }
      steps[k].mean_pred = mean;
      steps[k].cov_pred = cov;
      if (k % n_step == 0) measurement_update(k / n_step, mean, cov);
      steps[k].mean_filt = mean;
      steps[k].cov_filt = cov;
    }

    // fixed-lag pass: state at fine node k conditions on observations up
    // to coarse index ceil(k/n_step) + lag
    const Eigen::Index lag_coarse = static_cast<Eigen::Index>(opts.lag);
    Eigen::MatrixXd X(n, nodes);
    for (Eigen::Index k = 0; k < nodes; ++k) {
      const Eigen::Index coarse_ahead =
          std::min<Eigen::Index>((k + n_step - 1) / n_step + lag_coarse, N);
      const Eigen::Index k_end = coarse_ahead * n_step;
      Eigen::VectorXd m_s = steps[k_end].mean_filt;
      for (Eigen::Index back = k_end; back > k; --back) {
        const Eigen::MatrixXd& P_pred = steps[back].cov_pred;
        const Eigen::MatrixXd gain =
            P_pred.ldlt().solve(Ad * steps[back - 1].cov_filt).transpose();
        m_s = steps[back - 1].mean_filt + gain * (m_s - steps[back].mean_pred);
      }
      X.col(k) = m_s;
    }
    smoothed.push_back(std::move(X));
  }
  return smoothed;
}

namespace {

// time derivative by central differences, one-sided at the ends
Eigen::MatrixXd finite_difference(const Eigen::MatrixXd& X, double dt) {
  const Eigen::Index cols = X.cols();
  Eigen::MatrixXd D(X.rows(), cols);
  D.col(0) = (X.col(1) - X.col(0)) / dt;
  D.col(cols - 1) = (X.col(cols - 1) - X.col(cols - 2)) / dt;
  for (Eigen::Index j = 1; j + 1 < cols; ++j)
    D.col(j) = (X.col(j + 1) - X.col(j - 1)) / (2.0 * dt);
  return D;
}

// trapezoid-weighted Gram accumulators of the discretized objective
void accumulate_normal_equations(const std::vector<Eigen::MatrixXd>& x_smooth,
                                 double dt, Eigen::MatrixXd& G,
                                 Eigen::MatrixXd& C, double& dd) {
  const Eigen::Index n = x_smooth.front().rows();
  G = Eigen::MatrixXd::Zero(n, n);
  C = Eigen::MatrixXd::Zero(n, n);
  dd = 0.0;
  for (const auto& X : x_smooth) {
    const Eigen::MatrixXd D = finite_difference(X, dt);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(X.cols(), dt);
    w(0) = w(X.cols() - 1) = dt / 2.0;
    const Eigen::MatrixXd Xw = X * w.asDiagonal();
    G += Xw * X.transpose();
    C += D * w.asDiagonal() * X.transpose();
    dd += (D * w.asDiagonal() * D.transpose()).trace();
  }
}

}  // namespace

double em_objective(const std::vector<Eigen::MatrixXd>& x_smooth,
                    double fine_dt, double lambda, const Eigen::MatrixXd& A) {
  Eigen::MatrixXd G, C;
  double dd;
  accumulate_normal_equations(x_smooth, fine_dt, G, C, dd);
  return dd - 2.0 * A.cwiseProduct(C).sum() +
         (A * G * A.transpose()).trace() + lambda * A.cwiseAbs().sum();
}

Eigen::MatrixXd m_step(const std::vector<Eigen::MatrixXd>& x_smooth,
                       double fine_dt, double lambda, const EmOptions& opts) {
  if (x_smooth.empty()) throw std::invalid_argument("m_step: no trajectories");
  if (!(lambda > 0.0)) throw std::invalid_argument("m_step: lambda must be positive");
  const Eigen::Index n = x_smooth.front().rows();
  Eigen::MatrixXd G, C;
  double dd;
  accumulate_normal_equations(x_smooth, fine_dt, G, C, dd);

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  const double half_lambda = lambda / 2.0;
  for (int sweep = 0; sweep < opts.cd_max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < n; ++k) {
        const double rho =
            C(i, k) - (A.row(i).dot(G.col(k)) - A(i, k) * G(k, k));
        double updated = 0.0;
        if (rho > half_lambda)
          updated = (rho - half_lambda) / G(k, k);
        else if (rho < -half_lambda)
          updated = (rho + half_lambda) / G(k, k);
        max_change = std::max(max_change, std::abs(updated - A(i, k)));
        A(i, k) = updated;
      }
    }
    if (max_change < opts.cd_tol) return A;
  }
  throw std::runtime_error(
      "m_step: coordinate descent failed to converge, objective " +
      std::to_string(em_objective(x_smooth, fine_dt, lambda, A)));
}

EmResult run_em_lasso(const TimeSeriesSet& data, Eigen::Index n_step,
                      double lambda, const Eigen::VectorXd& q_diag,
                      const Eigen::VectorXd& r_diag, const EmOptions& opts) {
  const Eigen::Index n = data.n();
  const double dt = data.dT / double(n_step);
  EmResult result;
  result.A = Eigen::MatrixXd::Zero(n, n);
  for (int it = 0; it < opts.max_iter; ++it) {
    const auto x_smooth = e_step(result.A, data, n_step, q_diag, r_diag, opts);
    const Eigen::MatrixXd A_next = m_step(x_smooth, dt, lambda, opts);
    result.objectives.push_back(em_objective(x_smooth, dt, lambda, A_next));
    const double change = (A_next - result.A).cwiseAbs().maxCoeff();
    result.A = A_next;
    result.iterations = it + 1;
    if (change < opts.tol) break;
  }
  return result;
}

}  // namespace sparsedyn
