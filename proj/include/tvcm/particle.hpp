#pragma once

// Conditional particle filter with ancestor sampling (CPF-AS).
//
// One sweep pins particle M-1 to a reference trajectory, resamples the
// ancestry of the others multinomially by weight, resamples the reference's
// ancestor in proportion to weight x transition density, and weights every
// particle by the observation density. Weights are kept in log space.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tvcm/latent.hpp"
#include "tvcm/model.hpp"
#include "tvcm/penalty.hpp"
#include "tvcm/rng.hpp"

namespace tvcm {

struct ParticleSystem {
  int M = 0;
  int T = 0;
  int dim = 0;
  std::vector<MatrixXd> states;  // states[t] is dim x M
  MatrixXi ancestors;            // (j, t): index at t-1 of particle j's parent; column 0 unused
  MatrixXd log_weights;          // (j, t)

  /// Normalized weights at time t (max-shifted before exponentiation).
  VectorXd weights(int t) const {
    const VectorXd lw = log_weights.col(t);
    const double mx = lw.maxCoeff();
    VectorXd w = (lw.array() - mx).exp().matrix();
    return w / w.sum();
  }

  /// The full trajectory (dim x T) ending in particle j at the final time.
  MatrixXd lineage(int j) const {
    MatrixXd Z(dim, T);
    int a = j;
    for (int t = T - 1; t >= 0; --t) {
      Z.col(t) = states[t].col(a);
      if (t > 0) a = ancestors(a, t);
    }
    return Z;
  }

  /// The last `window` states of particle j's lineage, newest first.
  MatrixXd final_window(int j, int window) const {
    MatrixXd W = MatrixXd::Zero(dim, window);
    int a = j;
    for (int l = 0; l < window && T - 1 - l >= 0; ++l) {
      const int t = T - 1 - l;
      W.col(l) = states[t].col(a);
      if (t > 0) a = ancestors(a, t);
    }
    return W;
  }
};

struct SweepOptions {
  unsigned threads = 1;
  ScadConfig scad;
};

struct SweepDiagnostics {
  int ancestor_fallbacks = 0;
  double mean_ess = 0.0;
  std::vector<std::string> warnings;
};

struct SweepResult {
  ParticleSystem system;
  MatrixXd trajectory;  // dim x T, drawn from the final weights
  SweepDiagnostics diagnostics;
};

/// Draws from the categorical law proportional to `weights` (unnormalized).
inline int sample_categorical(const VectorXd& weights, double total, Rng& rng) {
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  const int n = static_cast<int>(weights.size());
  for (int i = 0; i < n; ++i) {
    acc += weights(i);
    if (u < acc) return i;
  }
  for (int i = n - 1; i >= 0; --i)
    if (weights(i) > 0.0) return i;
  return n - 1;
}

/// `count` i.i.d. multinomial ancestor draws with P(s = i) proportional to weights(i).
inline std::vector<int> sample_ancestors(const VectorXd& weights, int count, Rng& rng) {
  if ((weights.array() < 0.0).any() || !weights.allFinite())
    throw Error(ErrorKind::InvalidInput, "weights must be finite and nonnegative");
  const double total = weights.sum();
  if (!(total > 0.0)) throw Error(ErrorKind::DegenerateWeights, "all ancestor weights are zero");
  std::vector<int> out(count);
  for (int k = 0; k < count; ++k) out[k] = sample_categorical(weights, total, rng);
  return out;
}

/// Normalizes log-weights with a max shift; returns an empty vector if no
/// entry is finite.
inline VectorXd exp_normalize(const VectorXd& logw) {
  double mx = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < logw.size(); ++i)
    if (std::isfinite(logw(i))) mx = std::max(mx, logw(i));
  if (!std::isfinite(mx)) return {};
  VectorXd w(logw.size());
  for (int i = 0; i < logw.size(); ++i) w(i) = std::isfinite(logw(i)) ? std::exp(logw(i) - mx) : 0.0;
  return w / w.sum();
}

/// Draws the ancestor of the reference state with probability proportional
/// to w_{t-1}^j f(ref | window_j). `transition_logpdf(j)` gives log f for
/// candidate j. Falls back to weight-only sampling when every product
/// vanishes and sets `fell_back`.
template <typename TransitionLogPdf>
int sample_reference_ancestor(const VectorXd& prev_log_weights, TransitionLogPdf&& transition_logpdf, Rng& rng,
                              bool& fell_back) {
  const int M = static_cast<int>(prev_log_weights.size());
  VectorXd lp(M);
  for (int j = 0; j < M; ++j) lp(j) = prev_log_weights(j) + transition_logpdf(j);
  VectorXd p = exp_normalize(lp);
  fell_back = p.size() == 0;
  if (fell_back) {
    p = exp_normalize(prev_log_weights);
    if (p.size() == 0) throw Error(ErrorKind::DegenerateWeights, "all previous weights are zero");
  }
  return sample_categorical(p, p.sum(), rng);
}

/// One AR transition of a particle given its window of past states.
inline VectorXd propagate_particle(const std::vector<ArSpec>& specs, const MatrixXd& window, int t, Rng& rng) {
  return ar_step(specs, window, t, rng);
}

/// p(x_t | z_t) as a plain density.
inline double weight_particle(const LatentLayout& layout, const VectorXd& z, const MatrixXd& X, int t) {
  return std::exp(layout.obs_loglik(z, X, t));
}

/// SCAD penalty of the coefficient slots of z and of their increments from
/// the parent state (when `parent` is non-null).
inline double coefficient_penalty(const LatentLayout& layout, const VectorXd& z, const VectorXd* parent,
                                  const ScadConfig& scad_cfg) {
  if (!scad_cfg.enabled()) return 0.0;
  double pen = 0.0;
  for (int d = 0; d < layout.coef_count(); ++d) {
    pen += scad(z(d), scad_cfg.lambda, scad_cfg.a);
    if (parent) pen += scad(z(d) - (*parent)(d), scad_cfg.lambda, scad_cfg.a);
  }
  return pen;
}

/// Joint log-density of reference states t..t+L-1 given that the state at
/// t-1 has window `window` (the factor that ancestor sampling needs for an
/// AR(L) latent process).
inline double reference_future_logpdf(const std::vector<ArSpec>& specs, const MatrixXd& reference, int t,
                                      const MatrixXd& window, int L) {
  const int T = static_cast<int>(reference.cols());
  double lp = 0.0;
  MatrixXd w = window;
  for (int k = t; k < std::min(T, t + L); ++k) {
    lp += ar_transition_logpdf(specs, reference.col(k), w, k);
    push_window(w, reference.col(k));
  }
  return lp;
}

/// One CPF-AS sweep conditioned on `reference` (dim x T).
inline SweepResult cpf_as_sweep(const TimeSeriesDataset& data, const SemParameters& theta,
                                const LatentLayout& layout, const MatrixXd& reference, int M, Rng& rng,
                                const SweepOptions& opts = {}) {
  const MatrixXd& X = data.values;
  const int T = data.T();
  const int D = layout.dim();
  if (M < 1) throw Error(ErrorKind::InvalidConfig, "particle count must be >= 1");
  if (reference.rows() != D || reference.cols() != T)
    throw Error(ErrorKind::InvalidInput, "reference trajectory has the wrong shape");
  const auto specs = layout.specs(theta);
  const int L = layout.max_order(specs);
  const int ref = M - 1;

  SweepResult out;
  ParticleSystem& ps = out.system;
  ps.M = M;
  ps.T = T;
  ps.dim = D;
  ps.states.assign(T, MatrixXd(D, M));
  ps.ancestors = MatrixXi::Zero(M, T);
  ps.log_weights = MatrixXd::Zero(M, T);

  const std::uint64_t sweep_seed = rng();
  std::vector<Rng> streams;
  streams.reserve(M);
  for (int j = 0; j < M; ++j) streams.emplace_back(derive_seed(sweep_seed, static_cast<std::uint64_t>(j)));

  std::vector<MatrixXd> hist(M, MatrixXd::Zero(D, L)), next_hist(M);
  std::vector<int> parent(M, 0);
  double ess_sum = 0.0;

  auto weigh = [&](int j, int t) {
    const VectorXd z = ps.states[t].col(j);
    double lw = layout.obs_loglik(z, X, t);
    if (opts.scad.enabled()) {
      const VectorXd prev = t > 0 ? VectorXd(hist[parent[j]].col(0)) : VectorXd();
      lw -= coefficient_penalty(layout, z, t > 0 ? &prev : nullptr, opts.scad);
    }
    ps.log_weights(j, t) = std::isnan(lw) ? -std::numeric_limits<double>::infinity() : lw;
  };

  for (int t = 0; t < T; ++t) {
    if (t > 0) {
      const VectorXd w = exp_normalize(ps.log_weights.col(t - 1));
      if (w.size() == 0)
        throw Error(ErrorKind::DegenerateWeights, "all weights vanish at t=" + std::to_string(t - 1));
      ess_sum += 1.0 / w.squaredNorm();
      const auto anc = sample_ancestors(w, M - 1, rng);
      for (int j = 0; j < M - 1; ++j) parent[j] = anc[j];
      bool fell_back = false;
      parent[ref] = sample_reference_ancestor(
          ps.log_weights.col(t - 1),
          [&](int j) {
            double lp = reference_future_logpdf(specs, reference, t, hist[j], L);
            if (opts.scad.enabled()) {
              const VectorXd prev = hist[j].col(0);
              const VectorXd zr = reference.col(t);
              double pen = 0.0;
              for (int d = 0; d < layout.coef_count(); ++d)
                pen += scad(zr(d) - prev(d), opts.scad.lambda, opts.scad.a);
              lp -= pen;
            }
            return lp;
          },
          rng, fell_back);
      if (fell_back) {
        ++out.diagnostics.ancestor_fallbacks;
        out.diagnostics.warnings.push_back("reference ancestor sampling fell back to weights at t=" +
                                           std::to_string(t));
      }
      for (int j = 0; j < M; ++j) ps.ancestors(j, t) = parent[j];
    }
    parallel_for(static_cast<std::size_t>(M), opts.threads, [&](std::size_t jj) {
      const int j = static_cast<int>(jj);
      const MatrixXd& window = hist[parent[j]];
      if (j == ref)
        ps.states[t].col(j) = reference.col(t);
      else
        ps.states[t].col(j) = propagate_particle(specs, window, t, streams[j]);
      weigh(j, t);
      next_hist[j] = window;
      push_window(next_hist[j], ps.states[t].col(j));
    });
    std::swap(hist, next_hist);
  }

  const VectorXd wT = exp_normalize(ps.log_weights.col(T - 1));
  if (wT.size() == 0) throw Error(ErrorKind::DegenerateWeights, "all weights vanish at t=" + std::to_string(T - 1));
  ess_sum += 1.0 / wT.squaredNorm();
  out.diagnostics.mean_ess = ess_sum / T;
  const int pick = sample_categorical(wT, wT.sum(), rng);
  out.trajectory = ps.lineage(pick);
  return out;
}

/// Unconditional draw of a latent trajectory from the prior; used as the
/// first reference.
inline MatrixXd prior_trajectory(const SemParameters& theta, const LatentLayout& layout, int T, Rng& rng) {
  const auto specs = layout.specs(theta);
  const int L = layout.max_order(specs);
  MatrixXd window = MatrixXd::Zero(layout.dim(), L);
  MatrixXd Z(layout.dim(), T);
  for (int t = 0; t < T; ++t) {
    Z.col(t) = ar_step(specs, window, t, rng);
    push_window(window, Z.col(t));
  }
  return Z;
}

}  // namespace tvcm
