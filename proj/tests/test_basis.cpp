#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sparsedyn/basis.hpp"

using namespace sparsedyn;

namespace {

// exact integral of the product of two piecewise-linear functions given by
// nodal values, via 2-point Gauss-Legendre per segment (degree-2 exact)
double gauss_product_integral(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                              double dt, bool derivative_of_u) {
  const double g = 1.0 / std::sqrt(3.0);
  double total = 0.0;
  for (Eigen::Index k = 0; k + 1 < u.size(); ++k) {
    const double su = (u(k + 1) - u(k)) / dt;
    const double sv = (v(k + 1) - v(k)) / dt;
    for (double xi : {-g, g}) {
      const double t = 0.5 * (xi + 1.0) * dt;  // local coordinate in [0, dt]
      const double uval = derivative_of_u ? su : u(k) + su * t;
      const double vval = v(k) + sv * t;
      total += 0.5 * dt * uval * vval;
    }
  }
  return total;
}

}  // namespace

TEST_CASE("printed K on the 3-node mesh") {
  MeshSpec mesh{1, 2.0, 2};  // delta T = 1, 3 fine nodes
  const BasisMatrices basis = build_basis(mesh);
  Eigen::MatrixXd expect(3, 3);
  expect << 2, 1, 0, 1, 4, 1, 0, 1, 2;
  expect /= 6.0;
  CHECK((basis.K - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("printed P_emb pattern for n_step=3") {
  MeshSpec mesh{2, 3.0, 3};
  const BasisMatrices basis = build_basis(mesh);
  REQUIRE(basis.P_emb.rows() == 3);
  REQUIRE(basis.P_emb.cols() == 7);
  Eigen::MatrixXd expect(3, 7);
  expect << 3, 2, 1, 0, 0, 0, 0,
            0, 1, 2, 3, 2, 1, 0,
            0, 0, 0, 0, 1, 2, 3;
  expect /= 3.0;
  CHECK((basis.P_emb - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("L structure: row sums and sign pattern") {
  MeshSpec mesh{3, 1.5, 4};
  const BasisMatrices basis = build_basis(mesh);
  const Eigen::Index n = basis.L.rows();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  CHECK(std::abs(ones.dot(basis.L * ones)) < 1e-14);
  CHECK(basis.L.row(0).sum() == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(basis.L.row(n - 1).sum() == doctest::Approx(1.0).epsilon(1e-14));
  for (Eigen::Index i = 1; i + 1 < n; ++i)
    CHECK(std::abs(basis.L.row(i).sum()) < 1e-14);

  RngStream rng(2);
  const Eigen::VectorXd x = rng.normal_vector(n);
  CHECK(x.dot(basis.K * x) > 0.0);
}

TEST_CASE("K and L reproduce exact quadrature on random hat expansions") {
  MeshSpec mesh{2, 1.3, 5};
  const BasisMatrices basis = build_basis(mesh);
  RngStream rng(19);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::VectorXd u = rng.normal_vector(mesh.fine_nodes());
    const Eigen::VectorXd v = rng.normal_vector(mesh.fine_nodes());
    const double mass = u.dot(basis.K * v);
    const double deriv = u.dot(basis.L * v);
    CHECK(mass == doctest::Approx(
        gauss_product_integral(u, v, mesh.fine_dt(), false)).epsilon(1e-12));
    CHECK(deriv == doctest::Approx(
        gauss_product_integral(u, v, mesh.fine_dt(), true)).epsilon(1e-12));
  }
}

TEST_CASE("P_emb reproduces linear functions exactly") {
  MeshSpec mesh{4, 0.7, 6};
  const BasisMatrices basis = build_basis(mesh);
  const double a = 1.37, b = -0.4;
  Eigen::VectorXd coarse(mesh.coarse_nodes());
  for (Eigen::Index j = 0; j < coarse.size(); ++j)
    coarse(j) = a * (j * mesh.dT) + b;
  const Eigen::VectorXd fine = basis.P_emb.transpose() * coarse;
  for (Eigen::Index k = 0; k < fine.size(); ++k)
    CHECK(fine(k) == doctest::Approx(a * (k * mesh.fine_dt()) + b).epsilon(1e-13));
  // partition of unity: each P_emb column sums to 1
  for (Eigen::Index k = 0; k < basis.P_emb.cols(); ++k)
    CHECK(basis.P_emb.col(k).sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("P_b factor reproduces the discrete bridge covariance exactly") {
  for (Eigen::Index n_step : {4, 8}) {
    MeshSpec mesh{1, 2.0, n_step};
    const BasisMatrices basis = build_basis(mesh);
    const Eigen::MatrixXd C = basis.P_b * basis.P_b.transpose();
    const double dt = mesh.fine_dt();
    const double T = mesh.dT;
    for (Eigen::Index k = 1; k < n_step; ++k)
      for (Eigen::Index l = 1; l < n_step; ++l) {
        const double t = k * dt, s = l * dt;
        const double exact = std::min(t, s) * (T - std::max(t, s)) / T;
        CHECK(C(k - 1, l - 1) == doctest::Approx(exact).epsilon(1e-12));
      }
  }
}

TEST_CASE("sample_bridge: pinning, midpoint variance, empirical covariance") {
  MeshSpec mesh{3, 1.6, 8};
  const BasisMatrices basis = build_basis(mesh);
  Eigen::VectorXd Q(2);
  Q << 1.0, 2.5;
  RngStream rng(101);

  const int draws = 100000;
  const Eigen::Index mid_local = 4;  // n_step/2 within the first interval
  Eigen::MatrixXd sum_outer =
      Eigen::MatrixXd::Zero(mesh.n_step - 1, mesh.n_step - 1);
  double mid_var = 0.0;
  for (int t = 0; t < draws; ++t) {
    const Eigen::MatrixXd B = sample_bridge(mesh, basis, Q, rng);
    for (Eigen::Index j = 0; j <= mesh.N; ++j) {
      CHECK(B(0, mesh.coarse_to_fine(j)) == 0.0);
      CHECK(B(1, mesh.coarse_to_fine(j)) == 0.0);
    }
    const Eigen::VectorXd interior = B.row(0).segment(1, mesh.n_step - 1);
    sum_outer += interior * interior.transpose();
    mid_var += B(1, mid_local) * B(1, mid_local);
  }
  CHECK(mid_var / draws == doctest::Approx(Q(1) * mesh.dT / 4.0).epsilon(0.03));
  const double dt = mesh.fine_dt();
  for (Eigen::Index k = 1; k < mesh.n_step; ++k)
    for (Eigen::Index l = k; l < mesh.n_step; ++l) {
      const double exact =
          Q(0) * (k * dt) * (mesh.dT - l * dt) / mesh.dT;  // l >= k
      CHECK(sum_outer(k - 1, l - 1) / draws ==
            doctest::Approx(exact).epsilon(0.03));
    }
}

TEST_CASE("cn_propose_anchor: degenerate and fixed-point cases") {
  RngStream rng(7);
  const Eigen::MatrixXd Y = rng.normal_matrix(2, 4);
  const Eigen::MatrixXd Y_curr = rng.normal_matrix(2, 4);
  Eigen::VectorXd R(2);
  R << 0.04, 0.09;

  // eps=1: Y_hat = Y + sqrt(R) G, independent of Y_curr
  RngStream r1(99), r2(99);
  const Eigen::MatrixXd h1 = cn_propose_anchor(Y, Y_curr, R, 1.0, r1);
  const Eigen::MatrixXd h2 = cn_propose_anchor(Y, 5.0 * Y_curr, R, 1.0, r2);
  CHECK((h1 - h2).cwiseAbs().maxCoeff() < 1e-14);
  // the increment is sqrt(R) G entrywise: variance check over many draws
  double acc = 0.0;
  const int n_rep = 50000;
  RngStream r3(5);
  for (int t = 0; t < n_rep; ++t) {
    const Eigen::MatrixXd h = cn_propose_anchor(Y, Y_curr, R, 1.0, r3);
    acc += std::pow(h(0, 0) - Y(0, 0), 2);
  }
  CHECK(acc / n_rep == doctest::Approx(R(0)).epsilon(0.03));
}

TEST_CASE("cn_propose_anchor stationary law is N(Y, R)") {
  RngStream rng(3);
  const Eigen::MatrixXd Y = rng.normal_matrix(1, 2);
  Eigen::VectorXd R(1);
  R << 0.25;
  Eigen::MatrixXd cur = Y;
  double mean = 0.0, second = 0.0;
  const int iters = 100000;
  for (int t = 0; t < iters; ++t) {
    cur = cn_propose_anchor(Y, cur, R, 0.4, rng);
    mean += cur(0, 0);
    second += std::pow(cur(0, 0) - Y(0, 0), 2);
  }
  CHECK(mean / iters == doctest::Approx(Y(0, 0)).epsilon(0.02));
  CHECK(second / iters == doctest::Approx(R(0)).epsilon(0.02));
}

TEST_CASE("cn_propose_trajectory: degenerate form and anchor consistency") {
  MeshSpec mesh{2, 1.0, 4};
  const BasisMatrices basis = build_basis(mesh);
  RngStream rng(21);
  Eigen::VectorXd Q = Eigen::VectorXd::Ones(2);

  // eps=1 reduces to fresh interpolant plus fresh bridge
  const Eigen::MatrixXd Y_hat = rng.normal_matrix(2, mesh.coarse_nodes());
  const Eigen::MatrixXd Y_curr = rng.normal_matrix(2, mesh.coarse_nodes());
  const Eigen::MatrixXd X_curr = rng.normal_matrix(2, mesh.fine_nodes());
  const Eigen::MatrixXd B = sample_bridge(mesh, basis, Q, rng);
  const Eigen::MatrixXd X1 =
      cn_propose_trajectory(Y_hat, Y_curr, X_curr, 1.0, basis, B);
  CHECK((X1 - (Y_hat * basis.P_emb + B)).cwiseAbs().maxCoeff() < 1e-12);

  // anchor consistency preserved over many random iterations
  Eigen::MatrixXd Yc = rng.normal_matrix(2, mesh.coarse_nodes());
  Eigen::MatrixXd Xc = Yc * basis.P_emb;
  for (int t = 0; t < 10000; ++t) {
    const Eigen::MatrixXd Yn = rng.normal_matrix(2, mesh.coarse_nodes());
    const Eigen::MatrixXd Bn = sample_bridge(mesh, basis, Q, rng);
    Xc = cn_propose_trajectory(Yn, Yc, Xc, 0.3, basis, Bn);
    Yc = Yn;
    for (Eigen::Index j = 0; j <= mesh.N; ++j)
      for (Eigen::Index i = 0; i < 2; ++i)
        CHECK(std::abs(Xc(i, mesh.coarse_to_fine(j)) - Yc(i, j)) < 1e-9);
  }
}

TEST_CASE("lemma1_log_ratio closed forms") {
  MeshSpec mesh{2, 1.0, 2};
  Eigen::VectorXd Q = Eigen::VectorXd::Ones(1);

  // proposed anchor increments equal current coarse increments -> 0
  Eigen::MatrixXd X(1, mesh.fine_nodes());
  X << 0.0, 0.3, 1.0, 1.4, 2.0;
  Eigen::MatrixXd Y_same(1, 3);
  Y_same << 5.0, 6.0, 7.0;  // increments (1,1) match X coarse increments
  CHECK(lemma1_log_ratio(X, Y_same, mesh, Q) == doctest::Approx(0.0).epsilon(1e-14));

  // current increments (1,1), proposed (0,0) -> (1+1)/2 = 1
  Eigen::MatrixXd Y_flat(1, 3);
  Y_flat << 2.0, 2.0, 2.0;
  CHECK(lemma1_log_ratio(X, Y_flat, mesh, Q) == doctest::Approx(1.0).epsilon(1e-14));
}
