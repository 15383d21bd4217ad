#pragma once

// Flat latent-state layout. Every latent process (one b_ij, one h_i or one
// c_ij^(s)) occupies a slot of a state vector z_t; a trajectory is a
// dim() x T matrix. Only processes in the parameter support get a slot.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

#include "tvcm/model.hpp"
#include "tvcm/rng.hpp"

namespace tvcm {

enum class SlotKind { Coef, LogVar, Lagged };

struct LatentSlot {
  SlotKind kind;
  int i;    // equation (target) index
  int j;    // regressor index; unused for LogVar
  int lag;  // 0-based lag group for Lagged slots
};

/// Autoregressive law of one latent process.
struct ArSpec {
  double intercept = 0.0;
  std::vector<double> coef;
  double innovation_var = 0.0;
  double init_mean = 0.0;
  double init_var = 1.0;

  int order() const { return static_cast<int>(coef.size()); }
};

/// Mean of the AR transition given the window of past values
/// (window(l) = z_{t-1-l}).
template <typename Window>
double ar_mean(const ArSpec& spec, const Window& window) {
  double mu = spec.intercept;
  for (int l = 0; l < spec.order(); ++l) mu += spec.coef[l] * window(l);
  return mu;
}

/// Log-density of a point under a normal law that may be degenerate. A zero
/// variance gives 0 at the mean and -inf elsewhere.
inline double degenerate_normal_logpdf(double x, double mean, double var) {
  if (var > 0.0) return normal_logpdf(x, mean, var);
  const double tol = 1e-12 * (1.0 + std::abs(mean));
  return std::abs(x - mean) <= tol ? 0.0 : -std::numeric_limits<double>::infinity();
}

class LatentLayout {
 public:
  LatentLayout() = default;

  explicit LatentLayout(const SemParameters& theta)
      : m_(theta.m), s_lag_(theta.s_lag), varying_noise_(theta.varying_noise()) {
    // Column-major over B with the diagonal removed.
    coef_index_ = MatrixXi::Constant(m_, m_, -1);
    for (int j = 0; j < m_; ++j)
      for (int i = 0; i < m_; ++i)
        if (i != j && theta.b_support(i, j)) {
          coef_index_(i, j) = dim();
          slots_.push_back({SlotKind::Coef, i, j, 0});
        }
    n_coef_ = dim();
    logvar_index_.assign(m_, -1);
    if (varying_noise_) {
      for (int i = 0; i < m_; ++i) {
        logvar_index_[i] = dim();
        slots_.push_back({SlotKind::LogVar, i, i, 0});
      }
    } else {
      fixed_log_var_ = theta.sigma2_fixed->array().log().matrix();
    }
    lag_index_.assign(s_lag_, MatrixXi::Constant(m_, m_, -1));
    for (int s = 0; s < s_lag_; ++s)
      for (int j = 0; j < m_; ++j)
        for (int i = 0; i < m_; ++i)
          if (theta.c_support[s](i, j)) {
            lag_index_[s](i, j) = dim();
            slots_.push_back({SlotKind::Lagged, i, j, s});
          }
    acyclic_support_ = validate_acyclic(theta.b_support);
  }

  int m() const { return m_; }
  int s_lag() const { return s_lag_; }
  int dim() const { return static_cast<int>(slots_.size()); }
  int coef_count() const { return n_coef_; }
  bool varying_noise() const { return varying_noise_; }
  bool acyclic_support() const { return acyclic_support_; }
  const std::vector<LatentSlot>& slots() const { return slots_; }
  const LatentSlot& slot(int d) const { return slots_[d]; }

  int coef_index(int i, int j) const { return coef_index_(i, j); }
  int logvar_index(int i) const { return logvar_index_[i]; }
  int lag_index(int s, int i, int j) const { return lag_index_[s](i, j); }

  /// The AR law of every slot under theta.
  std::vector<ArSpec> specs(const SemParameters& theta) const {
    std::vector<ArSpec> out;
    out.reserve(slots_.size());
    for (const auto& sl : slots_) {
      ArSpec sp;
      switch (sl.kind) {
        case SlotKind::Coef:
          sp.intercept = theta.alpha0(sl.i, sl.j);
          sp.coef = ar_column(theta.alpha, sl.i, sl.j);
          sp.innovation_var = theta.w(sl.i, sl.j);
          sp.init_mean = theta.init.b_mean(sl.i, sl.j);
          sp.init_var = theta.init.b_var(sl.i, sl.j);
          break;
        case SlotKind::LogVar:
          sp.intercept = theta.beta0(sl.i);
          sp.coef = ar_column(theta.beta, sl.i);
          sp.innovation_var = theta.v(sl.i);
          sp.init_mean = theta.init.h_mean(sl.i);
          sp.init_var = theta.init.h_var(sl.i);
          break;
        case SlotKind::Lagged:
          sp.intercept = theta.gamma0[sl.lag](sl.i, sl.j);
          sp.coef = ar_column(theta.gamma[sl.lag], sl.i, sl.j);
          sp.innovation_var = theta.u[sl.lag](sl.i, sl.j);
          sp.init_mean = theta.init.c_mean[sl.lag](sl.i, sl.j);
          sp.init_var = theta.init.c_var[sl.lag](sl.i, sl.j);
          break;
      }
      out.push_back(std::move(sp));
    }
    return out;
  }

  int max_order(const std::vector<ArSpec>& specs) const {
    int k = 1;
    for (const auto& s : specs) k = std::max(k, s.order());
    return k;
  }

  MatrixXd B(const VectorXd& z) const {
    MatrixXd out = MatrixXd::Zero(m_, m_);
    for (int d = 0; d < n_coef_; ++d) out(slots_[d].i, slots_[d].j) = z(d);
    return out;
  }

  VectorXd h(const VectorXd& z) const {
    if (!varying_noise_) return fixed_log_var_;
    VectorXd out(m_);
    for (int i = 0; i < m_; ++i) out(i) = z(logvar_index_[i]);
    return out;
  }

  MatrixXd C(const VectorXd& z, int s) const {
    MatrixXd out = MatrixXd::Zero(m_, m_);
    for (int d = 0; d < dim(); ++d)
      if (slots_[d].kind == SlotKind::Lagged && slots_[d].lag == s) out(slots_[d].i, slots_[d].j) = z(d);
    return out;
  }

  /// sum_s C_t^(s) x_{t-s-1}; lags before the first observation count as zero.
  VectorXd lag_contribution(const VectorXd& z, const MatrixXd& X, int t) const {
    VectorXd out = VectorXd::Zero(m_);
    for (int d = 0; d < dim(); ++d) {
      const auto& sl = slots_[d];
      if (sl.kind != SlotKind::Lagged) continue;
      const int tt = t - sl.lag - 1;
      if (tt >= 0) out(sl.i) += z(d) * X(tt, sl.j);
    }
    return out;
  }

  /// Residuals e_t = x_t - B_t x_t - lag contribution.
  VectorXd residuals(const VectorXd& z, const MatrixXd& X, int t) const {
    VectorXd r = X.row(t).transpose();
    for (int d = 0; d < dim(); ++d) {
      const auto& sl = slots_[d];
      if (sl.kind == SlotKind::Coef) {
        r(sl.i) -= z(d) * X(t, sl.j);
      } else if (sl.kind == SlotKind::Lagged) {
        const int tt = t - sl.lag - 1;
        if (tt >= 0) r(sl.i) -= z(d) * X(tt, sl.j);
      }
    }
    return r;
  }

  /// log p(x_t | z_t). Adds log|det(I - B_t)| when the support admits cycles.
  double obs_loglik(const VectorXd& z, const MatrixXd& X, int t) const {
    const VectorXd r = residuals(z, X, t);
    double ll = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double hi = varying_noise_ ? z(logvar_index_[i]) : fixed_log_var_(i);
      ll += -0.5 * (kLogTwoPi + hi + r(i) * r(i) * std::exp(-hi));
    }
    if (!acyclic_support_) {
      const MatrixXd IminusB = MatrixXd::Identity(m_, m_) - B(z);
      const double det = IminusB.partialPivLu().determinant();
      if (det == 0.0 || !std::isfinite(det)) return -std::numeric_limits<double>::infinity();
      ll += std::log(std::abs(det));
    }
    return ll;
  }

  LatentTrajectory to_trajectory(const MatrixXd& Z) const {
    LatentTrajectory out;
    const int T = static_cast<int>(Z.cols());
    out.B.reserve(T);
    out.h.reserve(T);
    out.C.assign(s_lag_, {});
    for (int t = 0; t < T; ++t) {
      const VectorXd z = Z.col(t);
      out.B.push_back(B(z));
      out.h.push_back(h(z));
      for (int s = 0; s < s_lag_; ++s) out.C[s].push_back(C(z, s));
    }
    return out;
  }

  MatrixXd from_trajectory(const LatentTrajectory& lt) const {
    const int T = lt.length();
    MatrixXd Z(dim(), T);
    for (int t = 0; t < T; ++t)
      for (int d = 0; d < dim(); ++d) {
        const auto& sl = slots_[d];
        switch (sl.kind) {
          case SlotKind::Coef: Z(d, t) = lt.B[t](sl.i, sl.j); break;
          case SlotKind::LogVar: Z(d, t) = lt.h[t](sl.i); break;
          case SlotKind::Lagged: Z(d, t) = lt.C[sl.lag][t](sl.i, sl.j); break;
        }
      }
    return Z;
  }

 private:
  int m_ = 0;
  int s_lag_ = 0;
  bool varying_noise_ = false;
  bool acyclic_support_ = true;
  int n_coef_ = 0;
  std::vector<LatentSlot> slots_;
  MatrixXi coef_index_;
  std::vector<int> logvar_index_;
  std::vector<MatrixXi> lag_index_;
  VectorXd fixed_log_var_;
};

/// Draws z_t given the window of the particle's past states
/// (window.col(l) = z_{t-1-l}). Slots whose recursion has not started yet
/// (t < order) are drawn from their initial prior.
inline VectorXd ar_step(const std::vector<ArSpec>& specs, const MatrixXd& window, int t, Rng& rng) {
  const int D = static_cast<int>(specs.size());
  VectorXd z(D);
  for (int d = 0; d < D; ++d) {
    const ArSpec& sp = specs[d];
    double mean, var;
    if (t < sp.order()) {
      mean = sp.init_mean;
      var = sp.init_var;
    } else {
      mean = ar_mean(sp, window.row(d));
      var = sp.innovation_var;
    }
    z(d) = var > 0.0 ? mean + std::sqrt(var) * standard_normal(rng) : mean;
  }
  return z;
}

/// log f(z_t | window). Slots still on their initial prior contribute a term
/// that does not depend on the window.
inline double ar_transition_logpdf(const std::vector<ArSpec>& specs, const VectorXd& z, const MatrixXd& window,
                                   int t) {
  double lp = 0.0;
  for (int d = 0; d < static_cast<int>(specs.size()); ++d) {
    const ArSpec& sp = specs[d];
    if (t < sp.order())
      lp += degenerate_normal_logpdf(z(d), sp.init_mean, sp.init_var);
    else
      lp += degenerate_normal_logpdf(z(d), ar_mean(sp, window.row(d)), sp.innovation_var);
  }
  return lp;
}

/// Shifts a window by one step, inserting z as the newest state.
inline void push_window(MatrixXd& window, const VectorXd& z) {
  const int L = static_cast<int>(window.cols());
  for (int l = L - 1; l > 0; --l) window.col(l) = window.col(l - 1);
  if (L > 0) window.col(0) = z;
}

}  // namespace tvcm
