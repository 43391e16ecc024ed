// Acceptance gate: one self-contained check per release criterion, each
// printing a single PASS/FAIL line. Exits nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sparsedyn/basis.hpp"
#include "sparsedyn/bench.hpp"
#include "sparsedyn/dynamic.hpp"
#include "sparsedyn/em_lasso.hpp"
#include "sparsedyn/io.hpp"
#include "sparsedyn/regression.hpp"
#include "sparsedyn/tempering.hpp"

using namespace sparsedyn;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << ": " << name << " (" << detail << ")"
            << std::endl;
  if (!ok) ++failures;
}

double elapsed_s(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// ---------------------------------------------------------------- helpers

TimeSeriesSet euler_dataset(const Eigen::MatrixXd& A, double q, double r,
                            double T, double dT, int n_series,
                            std::uint64_t seed) {
  const Eigen::Index n = A.rows();
  RngStream rng(seed);
  TimeSeriesSet data;
  data.dT = dT;
  const long N = std::lround(T / dT);
  const int sub = 64;
  const double h = dT / sub;
  for (int s = 0; s < n_series; ++s) {
    Eigen::VectorXd x = 2.0 * rng.normal_vector(n);
    Eigen::MatrixXd Y(n, N + 1);
    Y.col(0) = x + std::sqrt(r) * rng.normal_vector(n);
    for (long j = 1; j <= N; ++j) {
      for (int k = 0; k < sub; ++k)
        x += A * x * h + std::sqrt(q * h) * rng.normal_vector(n);
      Y.col(j) = x + std::sqrt(r) * rng.normal_vector(n);
    }
    data.Y.push_back(Y);
  }
  return data;
}

// batch-means Monte-Carlo standard error of a 0/1 indicator series
double batch_se(const std::vector<double>& xs, int n_batches = 20) {
  const std::size_t per = xs.size() / n_batches;
  double mean = 0.0;
  for (double v : xs) mean += v;
  mean /= double(xs.size());
  double var = 0.0;
  for (int b = 0; b < n_batches; ++b) {
    double bm = 0.0;
    for (std::size_t k = 0; k < per; ++k) bm += xs[b * per + k];
    bm /= double(per);
    var += (bm - mean) * (bm - mean);
  }
  var /= double(n_batches - 1);
  return std::sqrt(var / double(n_batches));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ------------------------------------------------------------ criterion 1

void criterion_1() {
  const auto t0 = Clock::now();
  RngStream data_rng(2101);
  RegressionData data;
  data.X = data_rng.normal_matrix(3, 20);
  Eigen::MatrixXd A_true(1, 3);
  A_true << 1.5, 0.0, -1.0;
  data.Y = A_true * data.X + 0.3 * data_rng.normal_matrix(1, 20);
  data.R_diag = Eigen::VectorXd::Constant(1, 0.09);
  data.M_diag = Eigen::MatrixXd::Constant(1, 3, 1.0);
  PriorConfig cfg;
  cfg.rho = 0.1;

  const PosteriorTable exact = enumerate_posterior(data, cfg);

  Schedule schedule;
  schedule.n_samples = 200000;
  schedule.burn_in = 2000;
  schedule.thin = 1;
  RngStream rng(99);
  const ChainRecord record = run_regression_mcmc(data, cfg, schedule, rng);

  const Eigen::MatrixXd marginals = record.edge_probabilities();
  const double max_abs =
      (marginals - exact.edge_marginals).cwiseAbs().maxCoeff();

  std::vector<double> freq(exact.entries.size(), 0.0);
  for (const auto& s : record.samples) {
    std::uint32_t bits = 0;
    for (Eigen::Index j = 0; j < 3; ++j) bits |= std::uint32_t(s.S(0, j)) << j;
    freq[bits] += 1.0;
  }
  double tv = 0.0;
  for (std::size_t k = 0; k < freq.size(); ++k)
    tv += std::abs(freq[k] / double(record.samples.size()) -
                   exact.entries[k].second);
  tv *= 0.5;

  const double secs = elapsed_s(t0);
  report("criterion 1: MCMC matches enumeration oracle",
         max_abs <= 0.02 && tv <= 0.02 && secs <= 60.0,
         "max abs err " + fmt(max_abs) + " <= 0.02, TV " + fmt(tv) +
             " <= 0.02, " + fmt(secs) + " s <= 60 s");
}

// ------------------------------------------------------------ criterion 2

void criterion_2() {
  // with the dynamics terms disabled the trajectory marginal must be the
  // Brownian bridge around the anchor interpolant
  TimeSeriesSet data;
  data.dT = 1.0;
  Eigen::MatrixXd Y(1, 4);
  Y << 0.3, -0.9, 0.5, 1.4;
  data.Y.push_back(Y);
  const Eigen::Index n_step = 8;
  const double q_true = 0.7;

  PriorConfig prior;
  DynOptions opts;
  opts.sample_hyper = false;
  opts.q_init = q_true;
  opts.r_init = 0.04;
  opts.adapt_eps = false;
  opts.eps_traj = 1.0;  // with the dynamics terms off every draw is exact
  opts.eps_anchor = 0.7;
  DynamicChain chain(data, n_step, prior, opts, 777);
  chain.force_phi_zero = true;

  const Eigen::MatrixXd P_emb = build_basis(chain.mesh(0)).P_emb;
  const long iters = 100000, burn = 2000;
  const Eigen::Index n_int = 3;           // intervals share one bridge law
  const Eigen::Index k_int = n_step - 1;  // interior nodes per interval
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(k_int, 1);
  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(k_int, k_int);
  for (long it = 0; it < burn + iters; ++it) {
    chain.iterate(1.0, 1.0);
    if (it < burn) continue;
    const auto& traj = chain.trajectories()[0];
    const Eigen::MatrixXd dev = traj.X - traj.Y_anchor * P_emb;
    for (Eigen::Index j = 0; j < n_int; ++j) {
      const Eigen::VectorXd d =
          dev.block(0, j * n_step + 1, 1, k_int).transpose();
      sum += d;
      outer += d * d.transpose();
    }
  }
  const double count = double(iters) * double(n_int);
  const Eigen::MatrixXd mean = sum / count;
  const Eigen::MatrixXd cov = outer / count - mean * mean.transpose();

  double worst = 0.0;
  const double delta = data.dT / double(n_step);
  for (Eigen::Index a = 0; a < k_int; ++a)
    for (Eigen::Index b = 0; b < k_int; ++b) {
      const double ta = delta * double(a + 1), tb = delta * double(b + 1);
      const double exact =
          q_true * std::min(ta, tb) * (data.dT - std::max(ta, tb)) / data.dT;
      worst = std::max(worst, std::abs(cov(a, b) - exact) / exact);
    }
  report("criterion 2: bridge covariance with dynamics terms off",
         worst <= 0.05, "max relative covariance error " + fmt(worst) +
                            " <= 0.05 over " + std::to_string(iters) +
                            " samples");
}

// ------------------------------------------------------------ criterion 3

void criterion_3() {
  Eigen::MatrixXd A(2, 2);
  A << -1.0, 0.0, 1.0, -1.0;
  const TimeSeriesSet data = euler_dataset(A, 0.1, 4e-4, 16.0, 0.25, 1, 303);

  PriorConfig prior;
  prior.rho = 0.1;
  Schedule schedule;
  schedule.n_samples = 1500;
  schedule.burn_in = 1500;
  schedule.thin = 2;

  std::vector<double> rates;
  for (Eigen::Index n_step : {4, 8, 16}) {
    DynOptions opts;
    opts.adapt_eps = false;
    opts.eps_traj = 0.2;
    opts.eps_anchor = 0.2;
    const ChainRecord record =
        run_dynamic_mcmc(data, n_step, prior, opts, schedule, 31);
    rates.push_back(record.trajectory_accept_rate());
  }
  const double lo = *std::min_element(rates.begin(), rates.end());
  const double hi = *std::max_element(rates.begin(), rates.end());
  report("criterion 3: CN acceptance stable under mesh refinement",
         lo > 0.0 && hi / lo < 2.0,
         "acceptance rates " + fmt(rates[0]) + "/" + fmt(rates[1]) + "/" +
             fmt(rates[2]) + " for n_step 4/8/16, spread factor " +
             fmt(hi / lo) + " < 2");
}

// ------------------------------------------------------------ criterion 4

void criterion_4() {
  const auto t0 = Clock::now();
  RingSpec spec;
  spec.ring_sizes = {8, 12};
  const auto [A, truth] = generate_transport_matrix(spec);
  NoiseSpec noise;  // benchmark defaults: OU driver theta 10, cov 4,
                    // measurement sd 0.04, initial sd 2
  RngStream gen_rng(41);
  TimeSeriesSet data;
  data.dT = 0.5;
  for (int s = 0; s < 2; ++s)
    data.Y.push_back(
        simulate_series(A, noise, 10.0, 0.5, 0.05, gen_rng).Y);

  PriorConfig prior;
  prior.rho = 0.01;
  Schedule schedule;
  schedule.n_samples = 20000;
  schedule.burn_in = 3000;
  schedule.thin = 1;
  DynOptions opts;
  // the benchmark noise is an OU process, not the Brownian driver the
  // model assumes; sampling q under that mismatch opens a slow ridge
  // (large q with a fast self-loop fitting the fine-scale mean reversion)
  // that stalls desk-scale mixing, so the noise scales are pinned to the
  // values implied by the benchmark setup: q matches the effective
  // increment variance of the observations per unit time and r the known
  // measurement noise variance.
  opts.sample_hyper = false;
  opts.q_init = 0.8;
  opts.r_init = noise.meas_sd * noise.meas_sd;
  const ChainRecord record = run_heuristic_tempering(
      data, 4, prior, opts, 1.0 / 1.5, schedule, 10110);
  const Eigen::MatrixXd probs = record.edge_probabilities();
  const auto [auroc, auprec] = score_auroc_auprec(probs, truth);

  // EM-Lasso at its most favorable penalty over the benchmark grid
  Eigen::VectorXd qv = Eigen::VectorXd::Zero(20);
  double horizon = 0.0;
  for (const auto& Y : data.Y) {
    for (Eigen::Index j = 0; j + 1 < Y.cols(); ++j)
      qv += (Y.col(j + 1) - Y.col(j)).cwiseAbs2();
    horizon += data.dT * double(Y.cols() - 1);
  }
  const Eigen::VectorXd q_diag = qv / horizon;
  const Eigen::VectorXd r_diag =
      Eigen::VectorXd::Constant(20, noise.meas_sd * noise.meas_sd);
  double best_em = -1.0;
  for (double lambda : default_lambda_grid()) {
    const EmResult em = run_em_lasso(data, 4, lambda, q_diag, r_diag);
    const auto [em_auroc, em_auprec] =
        score_auroc_auprec(em.A.cwiseAbs(), truth);
    best_em = std::max(best_em, em_auroc);
  }

  const double secs = elapsed_s(t0);
  report("criterion 4: two-ring benchmark beats the baseline",
         auroc >= 0.90 && auroc > best_em && secs <= 1200.0,
         "MCMC AUROC " + fmt(auroc) + " >= 0.90 and > EM-Lasso best " +
             fmt(best_em) + ", AUPREC " + fmt(auprec) + ", " + fmt(secs) +
             " s <= 1200 s");
}

// ------------------------------------------------------------ criterion 5

void criterion_5() {
  Eigen::MatrixXd A(2, 2);
  A << -1.0, 0.0, 1.0, -1.0;
  const TimeSeriesSet data = euler_dataset(A, 0.1, 4e-4, 16.0, 0.25, 3, 555);
  PriorConfig prior;
  prior.rho = 0.1;
  Schedule schedule;
  schedule.n_samples = 2000;
  schedule.burn_in = 2000;
  schedule.thin = 10;

  struct Run {
    std::string name;
    Eigen::MatrixXd probs;
    Eigen::MatrixXd se;
  };
  std::vector<Run> runs;
  const auto add_run = [&](const std::string& name, const ChainRecord& rec) {
    Run run;
    run.name = name;
    run.probs = rec.edge_probabilities();
    run.se = Eigen::MatrixXd::Zero(2, 2);
    for (Eigen::Index i = 0; i < 2; ++i)
      for (Eigen::Index j = 0; j < 2; ++j) {
        std::vector<double> series;
        series.reserve(rec.samples.size());
        for (const auto& s : rec.samples) series.push_back(s.S(i, j));
        run.se(i, j) = std::max(batch_se(series),
                                1.0 / double(rec.samples.size()));
      }
    runs.push_back(std::move(run));
  };

  DynOptions joint;
  joint.gibbs = false;
  // fix the noise scales at the generating values so the comparison
  // isolates the structure/trajectory samplers; hyperparameter random
  // walks mix far more slowly than S and would dominate the error bars
  joint.sample_hyper = false;
  joint.q_init = 0.1;
  joint.r_init = 4e-4;
  add_run("joint", run_dynamic_mcmc(data, 4, prior, joint, schedule, 71));
  DynOptions gibbs = joint;
  gibbs.gibbs = true;
  add_run("gibbs", run_dynamic_mcmc(data, 4, prior, gibbs, schedule, 72));
  const Ladder ladder = Ladder::geometric(4, 1.05);
  add_run("ptemp",
          run_parallel_tempering(data, 4, prior, gibbs, ladder, schedule, 73));

  bool ok = true;
  double worst_z = 0.0;
  for (std::size_t a = 0; a < runs.size(); ++a)
    for (std::size_t b = a + 1; b < runs.size(); ++b)
      for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index j = 0; j < 2; ++j) {
          const double gap = std::abs(runs[a].probs(i, j) - runs[b].probs(i, j));
          const double se = std::hypot(runs[a].se(i, j), runs[b].se(i, j));
          worst_z = std::max(worst_z, gap / se);
          if (gap > 3.0 * se) ok = false;
        }
  report("criterion 5: joint, Gibbs, and tempering samplers agree",
         ok, "worst pairwise |gap|/SE " + fmt(worst_z) + " <= 3");
}

// ------------------------------------------------------------ criterion 6

void criterion_6() {
  const double q_true = 1.0, r_true = 0.2, dT = 0.1;
  const long N = 200;
  RngStream gen(606);
  TimeSeriesSet data;
  data.dT = dT;
  Eigen::MatrixXd Y(1, N + 1);
  double x = 0.0;
  Y(0, 0) = x + std::sqrt(r_true) * gen.normal();
  for (long j = 1; j <= N; ++j) {
    x += std::sqrt(q_true * dT) * gen.normal();
    Y(0, j) = x + std::sqrt(r_true) * gen.normal();
  }
  data.Y.push_back(Y);

  PriorConfig prior;
  Schedule schedule;
  schedule.n_samples = 6000;
  schedule.burn_in = 3000;
  schedule.thin = 5;
  DynOptions opts;
  const ChainRecord record =
      run_dynamic_mcmc(data, 4, prior, opts, schedule, 42);

  std::vector<double> qs, rs;
  for (const auto& s : record.samples) {
    qs.push_back(s.q(0));
    rs.push_back(s.r(0));
  }
  const double q_med = median(qs), r_med = median(rs);
  const bool ok = q_med > q_true / 2.0 && q_med < q_true * 2.0 &&
                  r_med > r_true / 2.0 && r_med < r_true * 2.0;
  report("criterion 6: hyperparameter recovery within factor 2", ok,
         "posterior medians q " + fmt(q_med) + " vs " + fmt(q_true) + ", r " +
             fmt(r_med) + " vs " + fmt(r_true));
}

// ------------------------------------------------------------ criterion 7

void criterion_7() {
  // M-step: L1 subgradient optimality on random smooth instances
  bool subgrad_ok = true;
  double worst_violation = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    RngStream rng(700 + rep);
    std::vector<Eigen::MatrixXd> xs;
    Eigen::MatrixXd X(3, 80);
    for (Eigen::Index i = 0; i < 3; ++i) {
      const double a = rng.normal(), b = rng.normal(), c = rng.normal();
      const double w = 1.0 + double(i);
      for (Eigen::Index j = 0; j < 80; ++j) {
        const double t = 0.05 * j;
        X(i, j) = a * std::sin(w * t + b) + c * std::cos(0.3 * w * t);
      }
    }
    xs.push_back(X);
    const double dt = 0.05, lambda = 0.7;
    const Eigen::MatrixXd A = m_step(xs, dt, lambda);

    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(3, 3);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(3, 3);
    for (Eigen::Index j = 0; j < 80; ++j) {
      Eigen::VectorXd d(3);
      if (j == 0)
        d = (X.col(1) - X.col(0)) / dt;
      else if (j == 79)
        d = (X.col(79) - X.col(78)) / dt;
      else
        d = (X.col(j + 1) - X.col(j - 1)) / (2.0 * dt);
      const double w = (j == 0 || j == 79) ? dt / 2.0 : dt;
      G += w * X.col(j) * X.col(j).transpose();
      C += w * d * X.col(j).transpose();
    }
    const Eigen::MatrixXd grad = 2.0 * (A * G - C);
    for (Eigen::Index i = 0; i < 3; ++i)
      for (Eigen::Index k = 0; k < 3; ++k) {
        const double v =
            A(i, k) == 0.0
                ? std::max(0.0, std::abs(grad(i, k)) - lambda)
                : std::abs(grad(i, k) + lambda * (A(i, k) > 0 ? 1.0 : -1.0));
        worst_violation = std::max(worst_violation, v);
        if (v > 1e-6) subgrad_ok = false;
      }
  }

  // E-step: fixed-lag smoother equals dense joint-Gaussian conditioning on
  // a 3-observation scalar record
  const double dT = 0.6, q = 0.3, r = 0.05;
  const Eigen::Index n_step = 3, N = 2;
  TimeSeriesSet data;
  data.dT = dT;
  Eigen::MatrixXd Y(1, N + 1);
  Y << 0.7, -0.4, 1.1;
  data.Y.push_back(Y);
  Eigen::MatrixXd A(1, 1);
  A << -0.5;
  EmOptions opts;

  Eigen::MatrixXd Ad, Qd;
  discretize_linear_sde(A, Eigen::VectorXd::Constant(1, q), dT / n_step, Ad, Qd);
  const double a = Ad(0, 0), qd = Qd(0, 0);
  const Eigen::Index nodes = N * n_step + 1;
  Eigen::VectorXd var(nodes);
  var(0) = opts.init_var;
  for (Eigen::Index k = 1; k < nodes; ++k) var(k) = a * a * var(k - 1) + qd;
  Eigen::MatrixXd Sigma(nodes, nodes);
  for (Eigen::Index j = 0; j < nodes; ++j)
    for (Eigen::Index k = j; k < nodes; ++k)
      Sigma(j, k) = Sigma(k, j) = std::pow(a, double(k - j)) * var(j);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(3, nodes);
  H(0, 0) = H(1, 3) = H(2, 6) = 1.0;
  const Eigen::MatrixXd innov =
      H * Sigma * H.transpose() + r * Eigen::MatrixXd::Identity(3, 3);
  const Eigen::VectorXd mean_post =
      Sigma * H.transpose() * innov.llt().solve(Y.row(0).transpose());
  const auto smoothed =
      e_step(A, data, n_step, Eigen::VectorXd::Constant(1, q),
             Eigen::VectorXd::Constant(1, r), opts);
  double e_err = 0.0;
  for (Eigen::Index k = 0; k < nodes; ++k)
    e_err = std::max(e_err, std::abs(smoothed[0](0, k) - mean_post(k)));

  report("criterion 7: EM-Lasso M-step optimality, E-step exactness",
         subgrad_ok && e_err <= 1e-8,
         "worst subgradient violation " + fmt(worst_violation) +
             " <= 1e-6, smoother error " + fmt(e_err) + " <= 1e-8");
}

// ------------------------------------------------------------ criterion 8

void criterion_8() {
  RngStream rng(808);
  bool ok = true;
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Index n = 2 + rng.uniform_int(5);
    Eigen::MatrixXd scores(n, n);
    Eigen::MatrixXi S(n, n);
    long positives = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        scores(i, j) = std::round(10.0 * rng.uniform()) / 10.0;
        S(i, j) = rng.uniform() < 0.3 ? 1 : 0;
        positives += S(i, j);
      }
    if (positives == 0 || positives == n * n) S(0, 0) = 1 - S(0, 0);
    const Topology truth(S);

    std::vector<double> pos, neg;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        (truth(i, j) ? pos : neg).push_back(scores(i, j));
    double wins = 0.0;
    for (double p : pos)
      for (double q : neg) wins += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
    const double oracle = wins / (double(pos.size()) * double(neg.size()));

    const auto [auroc, auprec] = score_auroc_auprec(scores, truth);
    worst = std::max(worst, std::abs(auroc - oracle));
    if (std::abs(auroc - oracle) > 1e-12) ok = false;
  }

  Eigen::MatrixXi S(2, 2);
  S << 1, 0, 0, 1;
  Eigen::MatrixXd perfect(2, 2);
  perfect << 1.0, 0.0, 0.0, 1.0;
  const auto [p_roc, p_pr] = score_auroc_auprec(perfect, Topology(S));
  const auto [u_roc, u_pr] =
      score_auroc_auprec(Eigen::MatrixXd::Constant(2, 2, 0.3), Topology(S));
  if (p_roc != 1.0 || p_pr != 1.0 || u_roc != 0.5) ok = false;

  report("criterion 8: AUROC matches the pair-counting oracle", ok,
         "worst deviation " + fmt(worst) + " <= 1e-12 over 100 pairs, "
         "perfect (1,1), uniform 0.5");
}

// ------------------------------------------------------------ criterion 9

struct CliRunner {
  fs::path binary, work;
  bool run(const std::string& args) const {
    const std::string cmd =
        "cd " + work.string() + " && " + binary.string() + " " + args +
        " > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream out(work / name);
    out << text;
  }
};

bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

void criterion_9(const char* cli_path) {
  if (!cli_path || !fs::exists(cli_path)) {
    report("criterion 9: CLI determinism", false,
           "CLI binary path missing or invalid");
    return;
  }
  const fs::path root = fs::temp_directory_path() / "sparsedyn_acceptance";
  fs::remove_all(root);

  // identical configs and seeds, two separate working directories; every
  // file either run produces must be byte-identical across the pair
  const std::vector<std::pair<std::string, std::string>> configs = {
      {"gen.json",
       R"({"rings":[3,4],"T":6.0,"dT":0.5,"n_series":2,"output_dir":"ds"})"},
      {"reg.json",
       R"({"X":"ds/series_0.csv","Y":"ds/series_1.csv","r":0.1,)"
       R"("schedule":{"n_samples":500,"burn_in":100,"thin":1},"output_dir":"reg"})"},
      {"inf_gibbs.json",
       R"({"dataset":"ds","n_step":4,"schedule":{"n_samples":200,)"
       R"("burn_in":100,"thin":2},"output_dir":"inf_gibbs"})"},
      {"inf_ptemp.json",
       R"({"dataset":"ds","n_step":4,"ladder":{"count":4},)"
       R"("schedule":{"n_samples":150,"burn_in":100,"thin":2},"output_dir":"inf_ptemp"})"},
      {"base.json",
       R"({"dataset":"ds","n_step":4,"truth":"ds/topology.csv",)"
       R"("r":0.0016,"output_dir":"base"})"},
      {"score.json",
       R"({"scores":"ds/A_true.csv","truth":"ds/topology.csv","output_dir":"sc"})"},
      {"orc.json",
       R"({"X":"orc_X.csv","Y":"orc_Y.csv","r":0.1,"output_dir":"orc"})"},
      // small instance: exact enumeration needs m*n <= 16 indicator bits
      {"orc_X.csv",
       "1.5,-0.4,0.9,2.1,-1.2,0.3,1.8,-0.7\n"
       "0.2,1.1,-1.6,0.5,0.8,-2.0,0.1,1.3\n"
       "-0.9,0.6,1.4,-0.3,2.2,0.7,-1.1,0.4\n"},
      {"orc_Y.csv",
       "2.3,-1.0,0.5,1.9,-0.2,0.8,1.1,-1.5\n"
       "-0.6,1.7,0.3,-1.3,0.9,2.1,-0.4,0.6\n"},
  };
  const std::vector<std::string> commands = {
      "generate --config gen.json --seed 7",
      "regress --config reg.json --seed 7",
      "infer --config inf_gibbs.json --seed 7 --mode gibbs",
      "infer --config inf_ptemp.json --seed 7 --mode ptemp",
      "baseline --config base.json --seed 7 --oracle-lambda",
      "score --config score.json --seed 7",
      "oracle --config orc.json --seed 7",
  };

  bool ok = true;
  std::string detail = "all mode re-runs byte-identical";
  for (const std::string run : {"A", "B"}) {
    CliRunner cli;
    cli.binary = fs::absolute(cli_path);
    cli.work = root / run;
    fs::create_directories(cli.work);
    for (const auto& [name, text] : configs) cli.write(name, text);
    for (const auto& cmd : commands)
      if (!cli.run(cmd)) {
        ok = false;
        detail = "command failed: " + cmd;
      }
  }
  long compared = 0;
  if (ok) {
    for (const auto& entry : fs::recursive_directory_iterator(root / "A")) {
      if (!entry.is_regular_file()) continue;
      const fs::path rel = fs::relative(entry.path(), root / "A");
      ++compared;
      if (!same_bytes(entry.path(), root / "B" / rel)) {
        ok = false;
        detail = "outputs differ: " + rel.string();
        break;
      }
    }
    if (ok) detail += " (" + std::to_string(compared) + " files)";
  }
  fs::remove_all(root);
  report("criterion 9: CLI determinism", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9(argc > 1 ? argv[1] : nullptr);
  criterion_4();  // longest-running check last
  std::cout << (failures == 0 ? "ALL CRITERIA PASSED"
                              : std::to_string(failures) + " CRITERIA FAILED")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
