#pragma once

// Stochastic approximation EM with a CPF-AS E-step.
//
// The complete-data log-likelihood is quadratic in every AR parameter
// group, so the stochastic approximation of Q is carried exactly by running
// averages of per-slot regression moments (Gram matrix of [1, z_{t-1..t-L}],
// cross moments with z_t, sum of z_t^2). The closed-form M-step numerators
// and denominators are read off those moments with the latest parameter
// values.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tvcm/latent.hpp"
#include "tvcm/model.hpp"
#include "tvcm/particle.hpp"
#include "tvcm/penalty.hpp"
#include "tvcm/rng.hpp"

namespace tvcm {

struct FitConfig {
  int particles = 15;
  int iterations = 100;
  int burn_in = 50;     // lambda_k = 1 for k <= burn_in
  double kappa = 0.7;   // lambda_k = (k - burn_in)^-kappa afterwards
  Scenario scenario = Scenario::CoefOnly;
  int p_lag = 1;
  int q_lag = 1;
  int s_lag = 1;  // used by the with-lags scenario only
  int r_lag = 1;
  ScadConfig scad;
  double tolerance = 0.0;  // > 0 enables early stopping on parameter change
  unsigned long long seed = 1;
  unsigned threads = 1;
  int summary_window = 10;
  bool estimate_parameters = true;

  std::optional<MatrixXi> b_support;               // (i, j); default: all off-diagonal pairs
  std::optional<std::vector<MatrixXi>> c_support;  // default: all pairs
  std::optional<SemParameters> initial;            // overrides the default starting point

  void validate() const {
    if (particles < 2) throw Error(ErrorKind::InvalidConfig, "particles must be >= 2");
    if (iterations < 1) throw Error(ErrorKind::InvalidConfig, "iterations must be >= 1");
    if (burn_in < 0) throw Error(ErrorKind::InvalidConfig, "burn_in must be >= 0");
    if (!(kappa > 0.5 && kappa <= 1.0)) throw Error(ErrorKind::InvalidConfig, "kappa must lie in (0.5, 1]");
    if (p_lag < 1 || q_lag < 1 || r_lag < 1) throw Error(ErrorKind::InvalidConfig, "AR orders must be >= 1");
    if (scenario == Scenario::WithLags && s_lag < 1)
      throw Error(ErrorKind::InvalidConfig, "with-lags scenario needs s_lag >= 1");
    if (scad.lambda < 0.0 || !(scad.a > 2.0)) throw Error(ErrorKind::InvalidConfig, "SCAD needs lambda >= 0, a > 2");
    if (summary_window < 1) throw Error(ErrorKind::InvalidConfig, "summary_window must be >= 1");
  }
};

/// Step size lambda_k: 1 during burn-in, then (k - burn_in)^-kappa.
inline double step_size(int k, const FitConfig& cfg) {
  if (k < 1) throw Error(ErrorKind::InvalidInput, "step_size needs k >= 1");
  if (k <= cfg.burn_in) return 1.0;
  return std::pow(static_cast<double>(k - cfg.burn_in), -cfg.kappa);
}

/// Regression moments of one latent process.
struct SlotMoments {
  MatrixXd gram;    // sum u_t u_t^T, u_t = [1, z_{t-1}, ..., z_{t-L}]
  VectorXd cross;   // sum u_t z_t
  double sumsq = 0.0;
  double count = 0.0;
  // Initial slice t < L (used for the initial-state variance of lagged coefficients).
  double init_sum = 0.0;
  double init_sumsq = 0.0;
  double init_count = 0.0;
};

struct SufficientStats {
  std::vector<SlotMoments> slots;
  VectorXd resid_sumsq;  // sum_t e_{i,t}^2, constant-noise model
  double resid_count = 0.0;
  int k = 0;

  bool empty() const { return slots.empty(); }
};

inline SufficientStats zero_stats(const LatentLayout& layout, const std::vector<ArSpec>& specs) {
  SufficientStats st;
  for (int d = 0; d < layout.dim(); ++d) {
    const int L = specs[d].order();
    SlotMoments sm;
    sm.gram = MatrixXd::Zero(L + 1, L + 1);
    sm.cross = VectorXd::Zero(L + 1);
    st.slots.push_back(std::move(sm));
  }
  st.resid_sumsq = VectorXd::Zero(layout.m());
  return st;
}

/// Accumulates weight x statistics of one trajectory Z (dim x T) into st.
inline void accumulate_trajectory(SufficientStats& st, const LatentLayout& layout, const std::vector<ArSpec>& specs,
                                  const MatrixXd& Z, const MatrixXd& X, double weight) {
  const int T = static_cast<int>(Z.cols());
  for (int d = 0; d < layout.dim(); ++d) {
    SlotMoments& sm = st.slots[d];
    const int L = specs[d].order();
    VectorXd u(L + 1);
    for (int t = 0; t < T; ++t) {
      const double z = Z(d, t);
      if (t < L) {
        sm.init_sum += weight * z;
        sm.init_sumsq += weight * z * z;
        sm.init_count += weight;
        continue;
      }
      u(0) = 1.0;
      for (int l = 1; l <= L; ++l) u(l) = Z(d, t - l);
      sm.gram.noalias() += weight * u * u.transpose();
      sm.cross.noalias() += weight * z * u;
      sm.sumsq += weight * z * z;
      sm.count += weight;
    }
  }
  if (!layout.varying_noise()) {
    for (int t = 0; t < T; ++t) st.resid_sumsq += weight * layout.residuals(Z.col(t), X, t).array().square().matrix();
    st.resid_count += weight * T;
  }
}

/// Final-weight-averaged statistics of the current particle system (the
/// bracketed per-iteration terms of the stochastic approximation).
inline SufficientStats particle_statistics(const ParticleSystem& ps, const LatentLayout& layout,
                                           const std::vector<ArSpec>& specs, const TimeSeriesDataset& data) {
  SufficientStats st = zero_stats(layout, specs);
  const VectorXd w = ps.weights(ps.T - 1);
  for (int j = 0; j < ps.M; ++j) {
    if (w(j) == 0.0) continue;
    accumulate_trajectory(st, layout, specs, ps.lineage(j), data.values, w(j));
  }
  return st;
}

/// A <- (1 - lambda) A + lambda * current, entry by entry.
inline SufficientStats update_q_statistics(const SufficientStats& stats, const SufficientStats& current,
                                           double lambda) {
  if (stats.empty()) {
    SufficientStats out = current;
    if (lambda != 1.0) {
      for (auto& sm : out.slots) {
        sm.gram *= lambda;
        sm.cross *= lambda;
        sm.sumsq *= lambda;
        sm.count *= lambda;
        sm.init_sum *= lambda;
        sm.init_sumsq *= lambda;
        sm.init_count *= lambda;
      }
      out.resid_sumsq *= lambda;
      out.resid_count *= lambda;
    }
    out.k = 1;
    return out;
  }
  if (stats.slots.size() != current.slots.size())
    throw Error(ErrorKind::InvalidInput, "statistics have different layouts");
  SufficientStats out = stats;
  const double keep = 1.0 - lambda;
  for (std::size_t d = 0; d < out.slots.size(); ++d) {
    auto& a = out.slots[d];
    const auto& c = current.slots[d];
    a.gram = keep * a.gram + lambda * c.gram;
    a.cross = keep * a.cross + lambda * c.cross;
    a.sumsq = keep * a.sumsq + lambda * c.sumsq;
    a.count = keep * a.count + lambda * c.count;
    a.init_sum = keep * a.init_sum + lambda * c.init_sum;
    a.init_sumsq = keep * a.init_sumsq + lambda * c.init_sumsq;
    a.init_count = keep * a.init_count + lambda * c.init_count;
  }
  out.resid_sumsq = keep * out.resid_sumsq + lambda * current.resid_sumsq;
  out.resid_count = keep * out.resid_count + lambda * current.resid_count;
  out.k = stats.k + 1;
  return out;
}

/// Convenience form: statistics of the particle system, then the update.
inline SufficientStats update_q_statistics(const SufficientStats& stats, const ParticleSystem& ps,
                                           const LatentLayout& layout, const std::vector<ArSpec>& specs,
                                           const TimeSeriesDataset& data, double lambda) {
  return update_q_statistics(stats, particle_statistics(ps, layout, specs, data), lambda);
}

// --- M step -----------------------------------------------------------------

struct MStepOptions {
  bool pin_intercept = false;
  double clamp = 0.999;
  int max_sweeps = 1000;
};

struct ArFit {
  double intercept = 0.0;
  std::vector<double> coef;
  double innovation_var = 0.0;
  int clamped = 0;
};

/// Numerator and denominator of the closed-form update of the lag-p AR
/// coefficient, holding the intercept and the other coefficients fixed.
inline std::pair<double, double> ar_coefficient_terms(const SlotMoments& sm, double intercept,
                                                      const std::vector<double>& coef, int p) {
  const int L = static_cast<int>(coef.size());
  double num = sm.cross(p) - intercept * sm.gram(0, p);
  for (int l = 1; l <= L; ++l)
    if (l != p) num -= coef[l - 1] * sm.gram(l, p);
  double trace = 0.0;
  for (int l = 1; l <= L; ++l) trace += sm.gram(l, l);
  const double den = sm.gram(p, p) + 1e-8 * trace / L;
  return {num, den};
}

/// Weighted mean squared AR residual under the given coefficients.
inline double ar_residual_variance(const SlotMoments& sm, double intercept, const std::vector<double>& coef) {
  if (!(sm.count > 0.0)) throw Error(ErrorKind::SingularUpdate, "no transitions to estimate a variance from");
  const int L = static_cast<int>(coef.size());
  VectorXd th(L + 1);
  th(0) = intercept;
  for (int l = 0; l < L; ++l) th(l + 1) = coef[l];
  const double rss = sm.sumsq - 2.0 * th.dot(sm.cross) + th.dot(sm.gram * th);
  return std::max(0.0, rss / sm.count);
}

/// Coefficients then intercept, one coordinate at a time with the latest
/// values, repeated until the sweep no longer changes anything. Coefficients
/// are clamped into (-clamp, clamp).
inline ArFit m_step_ar(const SlotMoments& sm, double intercept, std::vector<double> coef,
                       const MStepOptions& opts = {}) {
  const int L = static_cast<int>(coef.size());
  if (!(sm.count > 0.0)) throw Error(ErrorKind::SingularUpdate, "no transitions to estimate AR parameters from");
  ArFit fit;
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double change = 0.0;
    fit.clamped = 0;
    for (int p = 1; p <= L; ++p) {
      const auto [num, den] = ar_coefficient_terms(sm, intercept, coef, p);
      if (!(den > 0.0) || !std::isfinite(den) || !std::isfinite(num))
        throw Error(ErrorKind::SingularUpdate, "AR denominator is singular");
      double a = num / den;
      if (a > opts.clamp) {
        a = opts.clamp;
        ++fit.clamped;
      } else if (a < -opts.clamp) {
        a = -opts.clamp;
        ++fit.clamped;
      }
      change = std::max(change, std::abs(a - coef[p - 1]));
      coef[p - 1] = a;
    }
    if (!opts.pin_intercept) {
      double num = sm.cross(0);
      for (int l = 1; l <= L; ++l) num -= coef[l - 1] * sm.gram(0, l);
      const double a0 = num / sm.gram(0, 0);
      change = std::max(change, std::abs(a0 - intercept));
      intercept = a0;
    }
    if (change <= 1e-13 * (1.0 + std::abs(intercept))) break;
  }
  fit.intercept = intercept;
  fit.coef = std::move(coef);
  fit.innovation_var = ar_residual_variance(sm, fit.intercept, fit.coef);
  return fit;
}

struct MStepReport {
  int clamped = 0;
};

/// Intercepts and AR coefficients of every coefficient process.
inline MStepReport m_step_alpha(const SufficientStats& st, const LatentLayout& layout, SemParameters& theta,
                                const MStepOptions& opts = {}) {
  MStepReport rep;
  for (int d = 0; d < layout.coef_count(); ++d) {
    const auto& sl = layout.slot(d);
    const ArFit fit = m_step_ar(st.slots[d], theta.alpha0(sl.i, sl.j), ar_column(theta.alpha, sl.i, sl.j), opts);
    theta.alpha0(sl.i, sl.j) = fit.intercept;
    for (int p = 0; p < theta.p_lag; ++p) theta.alpha[p](sl.i, sl.j) = fit.coef[p];
    rep.clamped += fit.clamped;
  }
  return rep;
}

/// Innovation variances of the coefficient processes under the current AR fit.
inline void m_step_w(const SufficientStats& st, const LatentLayout& layout, SemParameters& theta) {
  for (int d = 0; d < layout.coef_count(); ++d) {
    const auto& sl = layout.slot(d);
    theta.w(sl.i, sl.j) =
        ar_residual_variance(st.slots[d], theta.alpha0(sl.i, sl.j), ar_column(theta.alpha, sl.i, sl.j));
  }
}

/// beta_0, beta_q and v of the log-variance processes.
inline MStepReport m_step_beta_v(const SufficientStats& st, const LatentLayout& layout, SemParameters& theta,
                                 const MStepOptions& opts = {}) {
  MStepReport rep;
  if (!layout.varying_noise()) return rep;
  for (int i = 0; i < layout.m(); ++i) {
    const int d = layout.logvar_index(i);
    const ArFit fit = m_step_ar(st.slots[d], theta.beta0(i), ar_column(theta.beta, i), opts);
    theta.beta0(i) = fit.intercept;
    for (int q = 0; q < theta.q_lag; ++q) theta.beta[q](i) = fit.coef[q];
    theta.v(i) = fit.innovation_var;
    rep.clamped += fit.clamped;
  }
  return rep;
}

/// Constant noise variances: diagonal of the averaged (I - B_t) X_t X_t^T (I - B_t)^T.
inline VectorXd m_step_R(const SufficientStats& st) {
  if (!(st.resid_count > 0.0)) return VectorXd::Zero(st.resid_sumsq.size());
  return st.resid_sumsq / st.resid_count;
}

/// gamma_0, gamma_r, u of the lagged coefficient processes, plus the
/// initial-slice variance u_c around the initial mean mu_c (written into
/// theta.init.c_var).
inline MStepReport m_step_gamma_u(const SufficientStats& st, const LatentLayout& layout, SemParameters& theta,
                                  const MStepOptions& opts = {}) {
  MStepReport rep;
  for (int d = 0; d < layout.dim(); ++d) {
    const auto& sl = layout.slot(d);
    if (sl.kind != SlotKind::Lagged) continue;
    const int s = sl.lag;
    const ArFit fit = m_step_ar(st.slots[d], theta.gamma0[s](sl.i, sl.j), ar_column(theta.gamma[s], sl.i, sl.j), opts);
    theta.gamma0[s](sl.i, sl.j) = fit.intercept;
    for (int r = 0; r < theta.r_lag; ++r) theta.gamma[s][r](sl.i, sl.j) = fit.coef[r];
    theta.u[s](sl.i, sl.j) = fit.innovation_var;
    rep.clamped += fit.clamped;
    const SlotMoments& sm = st.slots[d];
    if (sm.init_count > 0.0 && static_cast<int>(theta.init.c_mean.size()) == theta.s_lag) {
      const double mu = theta.init.c_mean[s](sl.i, sl.j);
      const double uc = (sm.init_sumsq - 2.0 * mu * sm.init_sum + mu * mu * sm.init_count) / sm.init_count;
      theta.init.c_var[s](sl.i, sl.j) = std::max(uc, 1e-8);
    }
  }
  return rep;
}

// --- Objectives -------------------------------------------------------------

/// Sum over t of log p(X_t | B_t, h_t, C_t) minus SCAD penalties on every
/// off-diagonal b_{ij,t} and on b_{ij,t} - b_{ij,t-1}.
inline double penalized_loglik(const TimeSeriesDataset& data, const LatentTrajectory& latents, double lambda,
                               double a) {
  if (lambda < 0.0 || !(a > 2.0)) throw Error(ErrorKind::InvalidHyperparameter, "need lambda >= 0 and a > 2");
  const int T = latents.length();
  if (T > data.T()) throw Error(ErrorKind::InvalidInput, "latents longer than data");
  const int m = data.m();
  double ll = 0.0;
  for (int t = 0; t < T; ++t) {
    const VectorXd x = data.values.row(t).transpose();
    VectorXd lag = VectorXd::Zero(m);
    for (std::size_t s = 0; s < latents.C.size(); ++s) {
      const int tt = t - static_cast<int>(s) - 1;
      if (tt >= 0) lag += latents.C[s][t] * data.values.row(tt).transpose();
    }
    ll += structural_loglik(x, latents.B[t], latents.h[t], lag);
    if (lambda == 0.0) continue;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (i == j) continue;
        ll -= scad(latents.B[t](i, j), lambda, a);
        if (t > 0) ll -= scad(latents.B[t](i, j) - latents.B[t - 1](i, j), lambda, a);
      }
  }
  return ll;
}

/// Latent part of log p(X, Z): prior plus AR transition densities.
inline double latent_logpdf(const std::vector<ArSpec>& specs, const MatrixXd& Z) {
  const int L = [&] {
    int k = 1;
    for (const auto& s : specs) k = std::max(k, s.order());
    return k;
  }();
  MatrixXd window = MatrixXd::Zero(Z.rows(), L);
  double lp = 0.0;
  for (int t = 0; t < Z.cols(); ++t) {
    lp += ar_transition_logpdf(specs, Z.col(t), window, t);
    push_window(window, Z.col(t));
  }
  return lp;
}

// --- Driver -----------------------------------------------------------------

struct FitDiagnostics {
  std::vector<double> mean_ess;  // per iteration
  int ancestor_fallbacks = 0;
  int clamped_estimates = 0;
  int iterations_run = 0;
  std::vector<std::string> warnings;
};

struct FitResult {
  SemParameters params;
  LatentLayout layout;
  ParticleSystem final_particles;
  MatrixXd reference;       // dim x T, last sampled trajectory
  MatrixXd posterior_mean;  // dim x T
  MatrixXd posterior_var;   // dim x T
  std::vector<double> q_trace;
  FitDiagnostics diagnostics;

  LatentTrajectory posterior_mean_trajectory() const { return layout.to_trajectory(posterior_mean); }
};

/// Starting parameters for a fit: scenario-dependent noise model, candidate
/// supports, per-variable sample variance as the constant noise variance.
inline SemParameters initial_parameters(const TimeSeriesDataset& data, const FitConfig& cfg) {
  if (cfg.initial) {
    SemParameters th = *cfg.initial;
    th.validate();
    return th;
  }
  const int m = data.m();
  const MatrixXi bs = cfg.b_support ? *cfg.b_support : full_support(m);
  std::optional<VectorXd> sigma2;
  if (cfg.scenario == Scenario::CoefOnly) {
    VectorXd var(m);
    for (int i = 0; i < m; ++i) {
      const auto col = data.values.col(i);
      const double mean = col.mean();
      var(i) = std::max((col.array() - mean).square().sum() / std::max(1, data.T() - 1), 1e-8);
    }
    sigma2 = var;
  }
  const int s_lag = cfg.scenario == Scenario::WithLags ? cfg.s_lag : 0;
  std::vector<MatrixXi> cs;
  if (s_lag > 0) cs = cfg.c_support ? *cfg.c_support : std::vector<MatrixXi>(s_lag, MatrixXi::Ones(m, m));
  return make_parameters(m, bs, sigma2, s_lag, cs, cfg.p_lag, cfg.q_lag, cfg.r_lag);
}

/// Runs the SAEM loop: CPF-AS sweep, stochastic-approximation update of the
/// statistics, closed-form M step.
inline FitResult saem_fit(const TimeSeriesDataset& data, const FitConfig& cfg, Rng& rng) {
  cfg.validate();
  if (data.T() < 2 || data.m() < 1) throw Error(ErrorKind::InvalidInput, "dataset too small");
  if (!data.values.allFinite()) throw Error(ErrorKind::InvalidInput, "dataset has nonfinite values");

  FitResult res;
  res.params = initial_parameters(data, cfg);
  SemParameters& theta = res.params;
  if (data.T() < theta.max_order() + 2) throw Error(ErrorKind::InvalidInput, "T too short for the AR orders");
  res.layout = LatentLayout(theta);
  const LatentLayout& layout = res.layout;
  const int T = data.T();
  const int D = layout.dim();

  SweepOptions sweep_opts;
  sweep_opts.threads = cfg.threads;
  sweep_opts.scad = cfg.scad;

  MatrixXd reference = prior_trajectory(theta, layout, T, rng);
  SufficientStats stats;
  MatrixXd mean_acc = MatrixXd::Zero(D, T), sq_acc = MatrixXd::Zero(D, T);
  int summarized = 0;
  int stable = 0;

  for (int k = 1; k <= cfg.iterations; ++k) {
    const auto specs = layout.specs(theta);
    SweepResult sweep;
    try {
      sweep = cpf_as_sweep(data, theta, layout, reference, cfg.particles, rng, sweep_opts);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " (iteration " + std::to_string(k) + ")");
    }
    reference = sweep.trajectory;
    res.diagnostics.mean_ess.push_back(sweep.diagnostics.mean_ess);
    res.diagnostics.ancestor_fallbacks += sweep.diagnostics.ancestor_fallbacks;
    for (auto& w : sweep.diagnostics.warnings)
      if (res.diagnostics.warnings.size() < 20)
        res.diagnostics.warnings.push_back("iteration " + std::to_string(k) + ": " + w);

    // Weighted complete-data log-likelihood under the sampling parameters.
    const ParticleSystem& ps = sweep.system;
    const VectorXd wT = ps.weights(T - 1);
    SufficientStats current = zero_stats(layout, specs);
    double q = 0.0;
    const bool summarize = k > cfg.iterations - cfg.summary_window;
    for (int j = 0; j < ps.M; ++j) {
      if (wT(j) == 0.0) continue;
      const MatrixXd Z = ps.lineage(j);
      accumulate_trajectory(current, layout, specs, Z, data.values, wT(j));
      double obs = 0.0;
      int a = j;
      for (int t = T - 1; t >= 0; --t) {
        obs += ps.log_weights(a, t);
        if (t > 0) a = ps.ancestors(a, t);
      }
      q += wT(j) * (obs + latent_logpdf(specs, Z));
      if (summarize) {
        mean_acc += wT(j) * Z;
        sq_acc += wT(j) * Z.cwiseProduct(Z);
      }
    }
    if (summarize) ++summarized;
    res.q_trace.push_back(q);
    res.final_particles = sweep.system;

    stats = update_q_statistics(stats, current, step_size(k, cfg));
    res.diagnostics.iterations_run = k;

    if (!cfg.estimate_parameters) continue;
    const SemParameters before = theta;
    try {
      MStepReport rep = m_step_alpha(stats, layout, theta);
      m_step_w(stats, layout, theta);
      rep.clamped += m_step_beta_v(stats, layout, theta).clamped;
      if (!layout.varying_noise()) theta.sigma2_fixed = m_step_R(stats).cwiseMax(1e-10);
      set_stationary_init(theta, /*keep_c_var=*/true);
      rep.clamped += m_step_gamma_u(stats, layout, theta).clamped;
      res.diagnostics.clamped_estimates += rep.clamped;
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " (iteration " + std::to_string(k) + ")");
    }
    if (cfg.tolerance > 0.0 && k > cfg.burn_in) {
      double change = (theta.alpha0 - before.alpha0).cwiseAbs().maxCoeff();
      for (int p = 0; p < theta.p_lag; ++p)
        change = std::max(change, (theta.alpha[p] - before.alpha[p]).cwiseAbs().maxCoeff());
      change = std::max(change, (theta.w - before.w).cwiseAbs().maxCoeff());
      stable = change < cfg.tolerance ? stable + 1 : 0;
      if (stable >= 5) break;
    }
  }

  if (summarized == 0) {
    // Stopped before the summary window opened: summarize the last system.
    const ParticleSystem& ps = res.final_particles;
    const VectorXd wT = ps.weights(T - 1);
    for (int j = 0; j < ps.M; ++j) {
      if (wT(j) == 0.0) continue;
      const MatrixXd Z = ps.lineage(j);
      mean_acc += wT(j) * Z;
      sq_acc += wT(j) * Z.cwiseProduct(Z);
    }
    summarized = 1;
  }
  res.reference = reference;
  res.posterior_mean = mean_acc / summarized;
  res.posterior_var = (sq_acc / summarized - res.posterior_mean.cwiseProduct(res.posterior_mean)).cwiseMax(0.0);
  return res;
}

}  // namespace tvcm
