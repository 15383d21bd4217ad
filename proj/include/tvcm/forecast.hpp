#pragma once

// One-step-ahead forecasting through the Markov blanket of a target.
//
// The latent states at T+1 are represented by an ensemble obtained by
// advancing the final CPF-AS particles one AR step. Predictive densities of
// a node given its parents are Monte Carlo mixtures over the ensemble, and
// the target's posterior given its blanket is explored by random-walk
// Metropolis-Hastings.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tvcm/graph.hpp"
#include "tvcm/latent.hpp"
#include "tvcm/model.hpp"
#include "tvcm/particle.hpp"
#include "tvcm/rng.hpp"
#include "tvcm/saem.hpp"

namespace tvcm {

/// Graph of a fit: thresholded posterior means, then cycle repair.
inline CausalGraph estimate_graph(const FitResult& fit, double threshold,
                                  std::vector<std::pair<int, int>>* removed = nullptr) {
  return enforce_acyclicity(determine_graph(fit.posterior_mean_trajectory(), threshold), removed);
}

/// Equally weighted latent windows (dim x L each, column 0 = newest state).
struct ForecastCloud {
  std::vector<MatrixXd> windows;
  int time = 0;  // index of the newest state in every window

  int size() const { return static_cast<int>(windows.size()); }
};

/// Samples of the latent state at the next time step.
struct PredictiveEnsemble {
  MatrixXd states;  // dim x J
  VectorXd weights;  // J, normalized
  std::vector<int> source;  // index of the window each sample was advanced from
  int time = 0;

  int size() const { return static_cast<int>(states.cols()); }
};

/// Resamples J windows from the final particle system by final-time weight.
inline ForecastCloud cloud_from_particles(const ParticleSystem& ps, int window, int J, Rng& rng) {
  const VectorXd w = ps.weights(ps.T - 1);
  ForecastCloud cloud;
  cloud.time = ps.T - 1;
  for (int k = 0; k < J; ++k) cloud.windows.push_back(ps.final_window(sample_categorical(w, w.sum(), rng), window));
  return cloud;
}

/// Advances every final-time particle one AR step, keeping its weight.
inline PredictiveEnsemble propagate_coefficients_one_step(const ParticleSystem& ps, const SemParameters& theta,
                                                          const LatentLayout& layout, Rng& rng) {
  const auto specs = layout.specs(theta);
  const int L = layout.max_order(specs);
  PredictiveEnsemble ens;
  ens.time = ps.T;
  ens.states.resize(ps.dim, ps.M);
  ens.weights = ps.weights(ps.T - 1);
  for (int j = 0; j < ps.M; ++j) {
    ens.states.col(j) = ar_step(specs, ps.final_window(j, L), ps.T, rng);
    ens.source.push_back(j);
  }
  return ens;
}

/// Advances every window of an equally weighted cloud one AR step.
inline PredictiveEnsemble propagate_coefficients_one_step(const ForecastCloud& cloud, const SemParameters& theta,
                                                          const LatentLayout& layout, Rng& rng) {
  const auto specs = layout.specs(theta);
  PredictiveEnsemble ens;
  ens.time = cloud.time + 1;
  ens.states.resize(layout.dim(), cloud.size());
  ens.weights = VectorXd::Constant(cloud.size(), 1.0 / cloud.size());
  for (int k = 0; k < cloud.size(); ++k) {
    ens.states.col(k) = ar_step(specs, cloud.windows[k], ens.time, rng);
    ens.source.push_back(k);
  }
  return ens;
}

/// Conditions the ensemble on the observed row X(ens.time) and resamples it
/// into the cloud for the next step.
inline ForecastCloud assimilate(const PredictiveEnsemble& ens, const ForecastCloud& cloud, const LatentLayout& layout,
                                const MatrixXd& X, Rng& rng) {
  const int J = ens.size();
  VectorXd logw(J);
  for (int k = 0; k < J; ++k) logw(k) = std::log(ens.weights(k)) + layout.obs_loglik(ens.states.col(k), X, ens.time);
  VectorXd w = exp_normalize(logw);
  if (w.size() == 0) w = ens.weights;
  ForecastCloud next;
  next.time = ens.time;
  for (int k = 0; k < J; ++k) {
    const int pick = sample_categorical(w, w.sum(), rng);
    MatrixXd win = cloud.windows[ens.source[pick]];
    push_window(win, ens.states.col(pick));
    next.windows.push_back(std::move(win));
  }
  return next;
}

/// Regression of one node on its parents across the ensemble.
struct NodeEnsemble {
  MatrixXd coefs;     // J x R
  VectorXd variance;  // J
  VectorXd weights;   // J, normalized
};

inline double log_sum_exp(const VectorXd& v) {
  const double mx = v.maxCoeff();
  if (!std::isfinite(mx)) return mx;
  return mx + std::log((v.array() - mx).exp().sum());
}

/// Monte Carlo predictive density sum_j w_j N(value; <b_j, regressors>, var_j).
inline double predictive_log_density(double value, const VectorXd& regressors, const NodeEnsemble& node) {
  const int J = static_cast<int>(node.variance.size());
  if (J == 0) throw Error(ErrorKind::InvalidInput, "empty ensemble");
  VectorXd terms(J);
  for (int j = 0; j < J; ++j) {
    const double mean = regressors.size() ? node.coefs.row(j).dot(regressors) : 0.0;
    terms(j) = std::log(node.weights(j)) + normal_logpdf(value, mean, node.variance(j));
  }
  return log_sum_exp(terms);
}

inline double predictive_density(double value, const VectorXd& regressors, const NodeEnsemble& node) {
  return std::exp(predictive_log_density(value, regressors, node));
}

/// Regression structure of node i in a graph: instantaneous parents and
/// lagged parents with their latent slots.
struct NodeRegression {
  int node = 0;
  std::vector<int> parents;  // instantaneous
  std::vector<int> parent_slots;
  struct Lagged {
    int source;
    int lag;  // 0-based lag group
    int slot;
  };
  std::vector<Lagged> lagged;
};

inline NodeRegression node_regression(const CausalGraph& graph, const LatentLayout& layout, int i) {
  NodeRegression r;
  r.node = i;
  for (int j = 0; j < graph.size(); ++j) {
    if (!graph.has_edge(j, i)) continue;
    const int d = layout.coef_index(i, j);
    if (d < 0) throw Error(ErrorKind::InvalidModel, "graph edge has no latent coefficient");
    r.parents.push_back(j);
    r.parent_slots.push_back(d);
  }
  for (int s = 0; s < static_cast<int>(graph.lagged.size()) && s < layout.s_lag(); ++s)
    for (int k = 0; k < graph.size(); ++k)
      if (graph.lagged[s](k, i)) {
        const int d = layout.lag_index(s, i, k);
        if (d >= 0) r.lagged.push_back({k, s, d});
      }
  return r;
}

inline NodeEnsemble node_ensemble(const PredictiveEnsemble& ens, const LatentLayout& layout, const NodeRegression& r,
                                  const SemParameters& theta) {
  const int J = ens.size();
  const int R = static_cast<int>(r.parents.size() + r.lagged.size());
  NodeEnsemble ne;
  ne.coefs.resize(J, R);
  ne.variance.resize(J);
  ne.weights = ens.weights;
  for (int k = 0; k < J; ++k) {
    int c = 0;
    for (int d : r.parent_slots) ne.coefs(k, c++) = ens.states(d, k);
    for (const auto& lg : r.lagged) ne.coefs(k, c++) = ens.states(lg.slot, k);
    ne.variance(k) = layout.varying_noise() ? std::exp(ens.states(layout.logvar_index(r.node), k))
                                            : (*theta.sigma2_fixed)(r.node);
  }
  return ne;
}

/// Regressor values of node r.node at time t given the current row x_t
/// (whose target entry may be a candidate) and past rows of X.
inline VectorXd node_regressors(const NodeRegression& r, const VectorXd& x_t, const MatrixXd& X, int t) {
  VectorXd reg(r.parents.size() + r.lagged.size());
  int c = 0;
  for (int j : r.parents) reg(c++) = x_t(j);
  for (const auto& lg : r.lagged) {
    const int tt = t - lg.lag - 1;
    reg(c++) = tt >= 0 ? X(tt, lg.source) : 0.0;
  }
  return reg;
}

/// Symmetric Gaussian random-walk proposal.
struct RandomWalkProposal {
  double scale = 1.0;

  double draw(double current, Rng& rng) const { return current + scale * standard_normal(rng); }
  /// log q(x | y) - log q(y | x); identically zero for a symmetric kernel.
  double hastings_log_correction(double, double) const { return 0.0; }
};

struct MhResult {
  double forecast = 0.0;
  std::vector<double> trace;  // Y^(0..N)
  double acceptance_rate = 0.0;
};

struct MhOptions {
  int samples = 2000;
  int burn_in = 100;
  int scale_window = 200;
};

/// Forecast of x_target at time `t` given every other variable at t and the
/// rows of X before t. The chain targets
///   p(Y | parents) * prod_children p(child | its parents with Y substituted),
/// starts at the last observed target value, and the forecast is the mean of
/// Y^(burn_in..N).
inline MhResult mh_forecast(int target, const CausalGraph& graph, const PredictiveEnsemble& ens,
                            const LatentLayout& layout, const SemParameters& theta, const VectorXd& x_t,
                            const MatrixXd& X, int t, Rng& rng, const MhOptions& opts = {}) {
  if (opts.samples <= opts.burn_in)
    throw Error(ErrorKind::InvalidConfig, "MH sample count must exceed the burn-in of " + std::to_string(opts.burn_in));
  if (t < 1 || t > X.rows()) throw Error(ErrorKind::InvalidInput, "forecast time needs observed history");
  const MarkovBlanket mb = markov_blanket(graph, target);

  const NodeRegression self = node_regression(graph, layout, target);
  const NodeEnsemble self_ens = node_ensemble(ens, layout, self, theta);
  std::vector<NodeRegression> kids;
  std::vector<NodeEnsemble> kid_ens;
  for (int c : mb.children) {
    kids.push_back(node_regression(graph, layout, c));
    kid_ens.push_back(node_ensemble(ens, layout, kids.back(), theta));
  }

  VectorXd x = x_t;
  auto log_target = [&](double y) {
    x(target) = y;
    double lp = predictive_log_density(y, node_regressors(self, x, X, t), self_ens);
    for (std::size_t c = 0; c < kids.size(); ++c)
      lp += predictive_log_density(x(kids[c].node), node_regressors(kids[c], x, X, t), kid_ens[c]);
    return lp;
  };

  const int from = std::max(0, t - opts.scale_window);
  const auto hist = X.col(target).segment(from, t - from);
  const double mean = hist.mean();
  double sd = std::sqrt((hist.array() - mean).square().sum() / std::max<Eigen::Index>(1, hist.size() - 1));
  if (!(sd > 0.0) || !std::isfinite(sd)) sd = 1.0;
  const RandomWalkProposal q{sd};

  MhResult res;
  double y = X(t - 1, target);
  double lp = log_target(y);
  res.trace.reserve(opts.samples + 1);
  res.trace.push_back(y);
  int accepted = 0;
  for (int i = 1; i <= opts.samples; ++i) {
    const double cand = q.draw(y, rng);
    const double lp_cand = log_target(cand);
    const double log_alpha = q.hastings_log_correction(y, cand) + lp_cand - lp;
    if (std::log(uniform01(rng)) < log_alpha) {
      y = cand;
      lp = lp_cand;
      ++accepted;
    }
    res.trace.push_back(y);
  }
  double sum = 0.0;
  for (int i = opts.burn_in; i <= opts.samples; ++i) sum += res.trace[i];
  res.forecast = sum / (opts.samples - opts.burn_in + 1);
  res.acceptance_rate = static_cast<double>(accepted) / opts.samples;
  return res;
}

/// Direct draws from the predictive mixture of a node with no children.
inline std::vector<double> sample_predictive(const NodeEnsemble& node, const VectorXd& regressors, int n, Rng& rng) {
  std::vector<double> out(n);
  const double total = node.weights.sum();
  for (int k = 0; k < n; ++k) {
    const int j = sample_categorical(node.weights, total, rng);
    const double mean = regressors.size() ? node.coefs.row(j).dot(regressors) : 0.0;
    out[k] = mean + std::sqrt(node.variance(j)) * standard_normal(rng);
  }
  return out;
}

/// Static least squares of the target on every other variable at the same
/// time (plus intercept), fitted on rows [0, t); predicts row t.
inline double static_ols_forecast(const MatrixXd& X, int target, int t) {
  const int m = static_cast<int>(X.cols());
  MatrixXd A(t, m);
  VectorXd y(t);
  for (int r = 0; r < t; ++r) {
    A(r, 0) = 1.0;
    int c = 1;
    for (int j = 0; j < m; ++j)
      if (j != target) A(r, c++) = X(r, j);
    y(r) = X(r, target);
  }
  const VectorXd beta = A.colPivHouseholderQr().solve(y);
  double pred = beta(0);
  int c = 1;
  for (int j = 0; j < m; ++j)
    if (j != target) pred += beta(c++) * X(t, j);
  return pred;
}

inline double naive_forecast(const MatrixXd& X, int target, int t) { return X(t - 1, target); }

struct RollingForecastOptions {
  int horizon = 10;
  int ensemble_size = 200;
  MhOptions mh;
};

struct RollingForecast {
  std::vector<double> mh;
  std::vector<double> static_ols;
  std::vector<double> naive;
  std::vector<double> actual;
  std::vector<double> acceptance;
};

/// Final latent windows of a fit with their final-time weights; enough to
/// resume forecasting without the full particle system.
struct ForecastState {
  std::vector<MatrixXd> windows;  // dim x L each, column 0 = state at time T-1
  VectorXd weights;
  int T = 0;
};

inline ForecastState forecast_state(const FitResult& fit) {
  const auto specs = fit.layout.specs(fit.params);
  const int L = fit.layout.max_order(specs);
  const ParticleSystem& ps = fit.final_particles;
  ForecastState st;
  st.T = ps.T;
  st.weights = ps.weights(ps.T - 1);
  for (int j = 0; j < ps.M; ++j) st.windows.push_back(ps.final_window(j, L));
  return st;
}

inline ForecastCloud cloud_from_state(const ForecastState& st, int J, Rng& rng) {
  if (st.windows.empty()) throw Error(ErrorKind::InvalidInput, "forecast state has no particles");
  ForecastCloud cloud;
  cloud.time = st.T - 1;
  const double total = st.weights.sum();
  for (int k = 0; k < J; ++k) cloud.windows.push_back(st.windows[sample_categorical(st.weights, total, rng)]);
  return cloud;
}

/// One-step-ahead forecasts of `target` at rows T .. T+horizon-1 of
/// `extended`, where the first T rows are the data the state was fitted on.
/// After each step the latent cloud is conditioned on the realized row.
inline RollingForecast rolling_forecast(const SemParameters& theta, const LatentLayout& layout,
                                        const CausalGraph& graph, const ForecastState& state,
                                        const MatrixXd& extended, int target, Rng& rng,
                                        const RollingForecastOptions& opts = {}) {
  const int T_fit = state.T;
  if (extended.rows() < T_fit + opts.horizon)
    throw Error(ErrorKind::InvalidInput, "extended series must hold " + std::to_string(opts.horizon) +
                                             " rows beyond the fitted range");
  if (extended.cols() != layout.m()) throw Error(ErrorKind::InvalidInput, "extended series has the wrong width");
  if (target < 0 || target >= extended.cols()) throw Error(ErrorKind::InvalidInput, "target index out of range");
  ForecastCloud cloud = cloud_from_state(state, opts.ensemble_size, rng);
  RollingForecast out;
  for (int k = 0; k < opts.horizon; ++k) {
    const int t = T_fit + k;
    const PredictiveEnsemble ens = propagate_coefficients_one_step(cloud, theta, layout, rng);
    const VectorXd x_t = extended.row(t).transpose();
    const MhResult mh = mh_forecast(target, graph, ens, layout, theta, x_t, extended, t, rng, opts.mh);
    out.mh.push_back(mh.forecast);
    out.acceptance.push_back(mh.acceptance_rate);
    out.static_ols.push_back(static_ols_forecast(extended, target, t));
    out.naive.push_back(naive_forecast(extended, target, t));
    out.actual.push_back(extended(t, target));
    cloud = assimilate(ens, cloud, layout, extended, rng);
  }
  return out;
}

inline RollingForecast rolling_forecast(const FitResult& fit, const CausalGraph& graph, const MatrixXd& extended,
                                        int target, Rng& rng, const RollingForecastOptions& opts = {}) {
  return rolling_forecast(fit.params, fit.layout, graph, forecast_state(fit), extended, target, rng, opts);
}

}  // namespace tvcm
