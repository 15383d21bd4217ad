#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <numeric>
#include <vector>

#include "tvcm/latent.hpp"
#include "tvcm/model.hpp"
#include "tvcm/rng.hpp"

namespace tvcm {

/// Draws latent trajectories from the AR recursions. Steps before a
/// process's AR order come from its initial prior.
inline LatentTrajectory simulate_latents(const SemParameters& theta, int T, Rng& rng) {
  theta.validate();
  if (T < theta.max_order()) throw Error(ErrorKind::InvalidInput, "T shorter than the AR order");
  const LatentLayout layout(theta);
  const auto specs = layout.specs(theta);
  const int L = layout.max_order(specs);
  MatrixXd window = MatrixXd::Zero(layout.dim(), L);
  MatrixXd Z(layout.dim(), T);
  for (int t = 0; t < T; ++t) {
    const VectorXd z = ar_step(specs, window, t, rng);
    Z.col(t) = z;
    push_window(window, z);
  }
  return layout.to_trajectory(Z);
}

/// Nonzero pattern of B in (from, to) orientation.
inline MatrixXi coefficient_pattern(const MatrixXd& B) {
  MatrixXi g = MatrixXi::Zero(B.rows(), B.cols());
  for (int i = 0; i < B.rows(); ++i)
    for (int j = 0; j < B.cols(); ++j)
      if (i != j && B(i, j) != 0.0) g(j, i) = 1;
  return g;
}

/// X_t = (I - B_t)^{-1} (sum_s C_t^(s) X_{t-s-1} + E_t) for given noise E
/// (T x m). The solve runs node by node in topological order.
inline MatrixXd solve_observations(const LatentTrajectory& latents, const MatrixXd& noise) {
  const int T = latents.length();
  if (T == 0) return MatrixXd(0, noise.cols());
  const int m = static_cast<int>(latents.B[0].rows());
  if (noise.rows() != T || noise.cols() != m) throw Error(ErrorKind::InvalidInput, "noise must be T x m");
  const int s_lag = static_cast<int>(latents.C.size());
  MatrixXd X = MatrixXd::Zero(T, m);
  for (int t = 0; t < T; ++t) {
    const MatrixXd& B = latents.B[t];
    const MatrixXi pattern = coefficient_pattern(B);
    if (!validate_acyclic(pattern))
      throw Error(ErrorKind::InvalidModel, "B_t has a cyclic pattern at t=" + std::to_string(t));
    VectorXd rhs = noise.row(t).transpose();
    for (int s = 0; s < s_lag; ++s) {
      const int tt = t - s - 1;
      if (tt >= 0) rhs += latents.C[s][t] * X.row(tt).transpose();
    }
    for (int i : topological_order(pattern)) {
      double xi = rhs(i);
      for (int j = 0; j < m; ++j)
        if (j != i && B(i, j) != 0.0) xi += B(i, j) * X(t, j);
      X(t, i) = xi;
    }
  }
  return X;
}

/// Draws E_t ~ N(0, diag(exp(h_t))) and solves the structural equations.
inline TimeSeriesDataset simulate_observations(const LatentTrajectory& latents, const SemParameters& theta,
                                               Rng& rng) {
  const int T = latents.length();
  const int m = theta.m;
  MatrixXd noise(T, m);
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < m; ++i) noise(t, i) = std::exp(0.5 * latents.h[t](i)) * standard_normal(rng);
  TimeSeriesDataset out;
  out.values = solve_observations(latents, noise);
  out.names = TimeSeriesDataset::default_names(m);
  return out;
}

struct BenchmarkInstance {
  TimeSeriesDataset data;
  CausalGraph graph;
  SemParameters params;
  LatentTrajectory latents;
};

/// Erdos-Renyi skeleton oriented along a random permutation; (from, to).
inline MatrixXi random_dag(int m, double p, Rng& rng) {
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> rank(m);
  for (int k = 0; k < m; ++k) rank[perm[k]] = k;
  MatrixXi g = MatrixXi::Zero(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      if (uniform01(rng) < p) {
        if (rank[a] < rank[b])
          g(a, b) = 1;
        else
          g(b, a) = 1;
      }
  return g;
}

inline double random_sign(Rng& rng) { return uniform01(rng) < 0.5 ? -1.0 : 1.0; }

/// One synthetic instance: random DAG, parameters from the configured
/// ranges, latent trajectories and observations.
inline BenchmarkInstance generate_benchmark_instance(const GeneratorConfig& cfg, Rng& rng) {
  cfg.validate();
  const int m = cfg.m;
  BenchmarkInstance inst;
  const MatrixXi dag = random_dag(m, cfg.edge_probability, rng);
  const bool varying = cfg.scenario != Scenario::CoefOnly;
  const int s_lag = cfg.scenario == Scenario::WithLags ? cfg.s_lag : 0;

  SemParameters th;
  th.m = m;
  th.p_lag = th.q_lag = th.r_lag = 1;
  th.s_lag = s_lag;
  th.b_support = support_from_graph(dag);
  th.alpha0 = MatrixXd::Zero(m, m);
  th.alpha.assign(1, MatrixXd::Zero(m, m));
  th.w = MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (!th.b_support(i, j)) continue;
      const double a1 = uniform(rng, cfg.alpha.lo, cfg.alpha.hi);
      const double mu = random_sign(rng) * uniform(rng, cfg.coef_mean.lo, cfg.coef_mean.hi);
      th.alpha[0](i, j) = a1;
      th.alpha0(i, j) = mu * (1.0 - a1);
      th.w(i, j) = uniform(rng, cfg.w.lo, cfg.w.hi);
    }
  VectorXd sigma2(m);
  for (int i = 0; i < m; ++i) sigma2(i) = uniform(rng, cfg.sigma2.lo, cfg.sigma2.hi);
  th.beta0 = VectorXd::Zero(m);
  th.beta.assign(1, VectorXd::Zero(m));
  th.v = VectorXd::Zero(m);
  if (varying) {
    for (int i = 0; i < m; ++i) {
      const double b1 = uniform(rng, cfg.beta.lo, cfg.beta.hi);
      th.beta[0](i) = b1;
      th.beta0(i) = std::log(sigma2(i)) * (1.0 - b1);
      th.v(i) = uniform(rng, cfg.v.lo, cfg.v.hi);
    }
  } else {
    th.sigma2_fixed = sigma2;
  }
  th.c_support.assign(s_lag, MatrixXi::Zero(m, m));
  th.gamma0.assign(s_lag, MatrixXd::Zero(m, m));
  th.gamma.assign(s_lag, std::vector<MatrixXd>(1, MatrixXd::Zero(m, m)));
  th.u.assign(s_lag, MatrixXd::Zero(m, m));
  for (int s = 0; s < s_lag; ++s)
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k) {
        if (!(uniform01(rng) < cfg.edge_probability)) continue;
        th.c_support[s](i, k) = 1;
        const double g1 = uniform(rng, cfg.gamma.lo, cfg.gamma.hi);
        const double mu = random_sign(rng) * uniform(rng, cfg.lag_coef_mean.lo, cfg.lag_coef_mean.hi);
        th.gamma[s][0](i, k) = g1;
        th.gamma0[s](i, k) = mu * (1.0 - g1);
        th.u[s](i, k) = uniform(rng, cfg.u.lo, cfg.u.hi);
      }
  set_stationary_init(th);
  th.validate();

  inst.latents = simulate_latents(th, cfg.T, rng);
  inst.data = simulate_observations(inst.latents, th, rng);
  inst.graph = CausalGraph::empty(m, s_lag);
  inst.graph.instantaneous = dag;
  for (int s = 0; s < s_lag; ++s) inst.graph.lagged[s] = th.c_support[s].transpose();
  inst.params = std::move(th);
  return inst;
}

}  // namespace tvcm
