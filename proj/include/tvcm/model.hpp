#pragma once

// Domain types for time-varying linear structural equation models.
//
// Orientation conventions:
//   * Coefficient matrices (B_t, alpha*, w, support masks, C_t^(s), gamma*, u)
//     are indexed (i, j) = "coefficient of x_j in the equation of x_i".
//   * CausalGraph adjacency is indexed (j, i) = 1 iff x_j -> x_i.
// Time is 0-based everywhere inside the library.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tvcm/error.hpp"

namespace tvcm {

using Eigen::MatrixXd;
using Eigen::MatrixXi;
using Eigen::VectorXd;

enum class Scenario { CoefOnly, CoefAndVariance, WithLags };

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::CoefOnly: return "coef-only";
    case Scenario::CoefAndVariance: return "coef-and-variance";
    case Scenario::WithLags: return "with-lags";
  }
  return "unknown";
}

inline Scenario parse_scenario(const std::string& s) {
  if (s == "coef-only") return Scenario::CoefOnly;
  if (s == "coef-and-variance") return Scenario::CoefAndVariance;
  if (s == "with-lags") return Scenario::WithLags;
  throw Error(ErrorKind::InvalidConfig, "unknown scenario '" + s + "'");
}

/// Prior moments of the latent processes for the time steps that precede
/// their autoregressive recursions.
struct InitPrior {
  MatrixXd b_mean, b_var;
  VectorXd h_mean, h_var;
  std::vector<MatrixXd> c_mean, c_var;
};

/// Static parameters of the state-space form of the model.
struct SemParameters {
  int m = 0;
  int p_lag = 1;
  int q_lag = 1;
  int s_lag = 0;
  int r_lag = 1;

  // Which b_ij / c_ij^(s) are latent processes. Entries outside the support
  // are structurally zero and never sampled.
  MatrixXi b_support;
  std::vector<MatrixXi> c_support;

  MatrixXd alpha0;
  std::vector<MatrixXd> alpha;
  MatrixXd w;

  VectorXd beta0;
  std::vector<VectorXd> beta;
  VectorXd v;

  std::vector<MatrixXd> gamma0;
  std::vector<std::vector<MatrixXd>> gamma;  // [s][r]
  std::vector<MatrixXd> u;

  // Present iff the noise variances are constant over time.
  std::optional<VectorXd> sigma2_fixed;

  InitPrior init;

  bool varying_noise() const { return !sigma2_fixed.has_value(); }
  int max_order() const {
    int k = p_lag;
    if (varying_noise()) k = std::max(k, q_lag);
    if (s_lag > 0) k = std::max(k, r_lag);
    return k;
  }

  void validate() const;
};

/// Per-time-step latent states.
struct LatentTrajectory {
  std::vector<MatrixXd> B;               // T x (m x m), zero diagonal
  std::vector<VectorXd> h;               // T x m, log noise variances
  std::vector<std::vector<MatrixXd>> C;  // s_lag x T x (m x m)

  int length() const { return static_cast<int>(B.size()); }
};

struct CausalGraph {
  MatrixXi instantaneous;        // (j, i) = 1 iff x_j -> x_i
  std::vector<MatrixXi> lagged;  // lagged[s](k, i) = 1 iff x_{k,t-s-1} -> x_{i,t}
  MatrixXd edge_scores;          // (j, i), same orientation as instantaneous
  std::vector<MatrixXd> lagged_scores;

  int size() const { return static_cast<int>(instantaneous.rows()); }
  bool has_edge(int from, int to) const { return instantaneous(from, to) != 0; }
  int edge_count() const { return instantaneous.sum(); }

  static CausalGraph empty(int m, int s_lag = 0) {
    CausalGraph g;
    g.instantaneous = MatrixXi::Zero(m, m);
    g.edge_scores = MatrixXd::Zero(m, m);
    for (int s = 0; s < s_lag; ++s) {
      g.lagged.push_back(MatrixXi::Zero(m, m));
      g.lagged_scores.push_back(MatrixXd::Zero(m, m));
    }
    return g;
  }
};

struct TimeSeriesDataset {
  MatrixXd values;  // T x m, row = time step
  std::vector<std::string> names;

  int T() const { return static_cast<int>(values.rows()); }
  int m() const { return static_cast<int>(values.cols()); }

  static std::vector<std::string> default_names(int m) {
    std::vector<std::string> out;
    for (int i = 0; i < m; ++i) out.push_back("x" + std::to_string(i + 1));
    return out;
  }
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct GeneratorConfig {
  int m = 5;
  int T = 500;
  unsigned long long seed = 1;
  double edge_probability = 0.3;
  Scenario scenario = Scenario::CoefOnly;
  int s_lag = 1;  // only used by the with-lags scenario

  Range sigma2{0.1, 0.5};
  Range w{0.01, 0.1};
  Range v{0.01, 0.1};
  Range alpha{0.8, 0.998};
  Range beta{0.8, 0.998};
  // Magnitude of the stationary mean of each b_ij; the sign is random.
  Range coef_mean{0.3, 1.0};

  Range lag_coef_mean{0.1, 0.3};
  Range gamma{0.8, 0.95};
  Range u{1e-4, 1e-3};

  void validate() const;
};

// ---------------------------------------------------------------------------

/// True iff the directed graph given by a square 0/1 adjacency has no cycle.
/// The matrix orientation does not matter for acyclicity.
inline bool validate_acyclic(const MatrixXi& adj) {
  if (adj.rows() != adj.cols())
    throw Error(ErrorKind::InvalidInput, "adjacency must be square");
  const int m = static_cast<int>(adj.rows());
  for (int i = 0; i < m; ++i) {
    if (adj(i, i) != 0) throw Error(ErrorKind::InvalidInput, "adjacency has a nonzero diagonal");
    for (int j = 0; j < m; ++j)
      if (adj(i, j) != 0 && adj(i, j) != 1)
        throw Error(ErrorKind::InvalidInput, "adjacency must be binary");
  }
  // Kahn's algorithm with rows as sources.
  std::vector<int> indegree(m, 0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) indegree[b] += adj(a, b);
  std::vector<int> ready;
  for (int b = 0; b < m; ++b)
    if (indegree[b] == 0) ready.push_back(b);
  int visited = 0;
  while (!ready.empty()) {
    const int a = ready.back();
    ready.pop_back();
    ++visited;
    for (int b = 0; b < m; ++b)
      if (adj(a, b) && --indegree[b] == 0) ready.push_back(b);
  }
  return visited == m;
}

/// Topological order of a DAG given in (from, to) orientation.
inline std::vector<int> topological_order(const MatrixXi& adj) {
  const int m = static_cast<int>(adj.rows());
  std::vector<int> indegree(m, 0), order;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) indegree[b] += adj(a, b);
  std::vector<int> ready;
  for (int b = m - 1; b >= 0; --b)
    if (indegree[b] == 0) ready.push_back(b);
  while (!ready.empty()) {
    const int a = ready.back();
    ready.pop_back();
    order.push_back(a);
    for (int b = m - 1; b >= 0; --b)
      if (adj(a, b) && --indegree[b] == 0) ready.push_back(b);
  }
  if (static_cast<int>(order.size()) != m)
    throw Error(ErrorKind::InvalidModel, "graph is cyclic");
  return order;
}

struct ArMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Stationary mean and variance of z_t = a0 + a1 z_{t-1} + N(0, w).
inline ArMoments ar_stationary_moments(double a0, double a1, double w) {
  if (!(std::abs(a1) < 1.0))
    throw Error(ErrorKind::Nonstationary, "AR coefficient " + std::to_string(a1) + " has |a1| >= 1");
  if (w < 0.0) throw Error(ErrorKind::InvalidInput, "innovation variance must be nonnegative");
  return {a0 / (1.0 - a1), w / (1.0 - a1 * a1)};
}

/// AR(p) version; the variance solves the Yule-Walker equations.
inline ArMoments ar_stationary_moments(double a0, const std::vector<double>& a, double w) {
  if (a.size() == 1) return ar_stationary_moments(a0, a[0], w);
  if (a.empty()) return {a0, w};
  const int p = static_cast<int>(a.size());
  MatrixXd companion = MatrixXd::Zero(p, p);
  for (int l = 0; l < p; ++l) companion(0, l) = a[l];
  for (int l = 1; l < p; ++l) companion(l, l - 1) = 1.0;
  Eigen::EigenSolver<MatrixXd> es(companion, false);
  if (es.eigenvalues().cwiseAbs().maxCoeff() >= 1.0)
    throw Error(ErrorKind::Nonstationary, "AR polynomial has a root on or outside the unit circle");
  double sum = 0.0;
  for (double c : a) sum += c;
  // gamma(k) - sum_l a_l gamma(|k-l|) = w * [k == 0], k = 0..p
  MatrixXd A = MatrixXd::Zero(p + 1, p + 1);
  VectorXd rhs = VectorXd::Zero(p + 1);
  rhs(0) = w;
  for (int k = 0; k <= p; ++k) {
    A(k, k) += 1.0;
    for (int l = 1; l <= p; ++l) A(k, std::abs(k - l)) -= a[l - 1];
  }
  const VectorXd gamma = A.fullPivLu().solve(rhs);
  return {a0 / (1.0 - sum), gamma(0)};
}

/// Initial-state prior from the stationary law; Normal(0, 1) when the law
/// collapses to a point mass at zero.
inline ArMoments initial_prior(double a0, const std::vector<double>& a, double w) {
  if (w == 0.0 && a0 == 0.0) return {0.0, 1.0};
  return ar_stationary_moments(a0, a, w);
}

inline constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

inline double normal_logpdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (kLogTwoPi + std::log(var) + d * d / var);
}

/// log p(x | B, h, lag) for an acyclic B: because |det(I - B)| = 1 the joint
/// density factorizes into per-node normal residual densities.
inline double observation_loglik(const VectorXd& x, const MatrixXd& B, const VectorXd& h,
                                 const VectorXd& lag_contribution) {
  if (!x.allFinite() || !B.allFinite() || !h.allFinite() || !lag_contribution.allFinite())
    throw Error(ErrorKind::InvalidInput, "observation_loglik: nonfinite input");
  const VectorXd resid = x - B * x - lag_contribution;
  double ll = 0.0;
  for (int i = 0; i < x.size(); ++i) ll += normal_logpdf(resid(i), 0.0, std::exp(h(i)));
  return ll;
}

inline double observation_loglik(const VectorXd& x, const MatrixXd& B, const VectorXd& h) {
  return observation_loglik(x, B, h, VectorXd::Zero(x.size()));
}

/// Same density without the acyclicity assumption:
/// log|det(I - B)| + sum_i log N(residual_i; 0, exp(h_i)).
inline double structural_loglik(const VectorXd& x, const MatrixXd& B, const VectorXd& h,
                                const VectorXd& lag_contribution) {
  const MatrixXd IminusB = MatrixXd::Identity(B.rows(), B.cols()) - B;
  const double det = IminusB.partialPivLu().determinant();
  if (det == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(std::abs(det)) + observation_loglik(x, B, h, lag_contribution);
}

// ---------------------------------------------------------------------------

inline void check_square(const MatrixXd& a, int m, const char* name) {
  if (a.rows() != m || a.cols() != m)
    throw Error(ErrorKind::InvalidModel, std::string(name) + " must be m x m");
}

inline void check_ar(const MatrixXd& a, const char* name) {
  if ((a.array().abs() >= 1.0).any())
    throw Error(ErrorKind::InvalidModel, std::string(name) + " entries must lie in (-1, 1)");
}

inline void SemParameters::validate() const {
  if (m <= 0) throw Error(ErrorKind::InvalidModel, "m must be positive");
  if (p_lag < 1 || q_lag < 1 || r_lag < 1 || s_lag < 0)
    throw Error(ErrorKind::InvalidModel, "AR orders must be >= 1 and s_lag >= 0");
  if (b_support.rows() != m || b_support.cols() != m)
    throw Error(ErrorKind::InvalidModel, "b_support must be m x m");
  for (int i = 0; i < m; ++i)
    if (b_support(i, i)) throw Error(ErrorKind::InvalidModel, "b_support must have a zero diagonal");
  check_square(alpha0, m, "alpha0");
  check_square(w, m, "w");
  if (static_cast<int>(alpha.size()) != p_lag) throw Error(ErrorKind::InvalidModel, "alpha size != p_lag");
  for (const auto& a : alpha) {
    check_square(a, m, "alpha_p");
    check_ar(a, "alpha_p");
  }
  if ((w.array() < 0.0).any()) throw Error(ErrorKind::InvalidModel, "w must be nonnegative");
  if (varying_noise()) {
    if (beta0.size() != m || v.size() != m || static_cast<int>(beta.size()) != q_lag)
      throw Error(ErrorKind::InvalidModel, "beta0/beta/v have wrong shapes");
    for (const auto& b : beta) {
      if (b.size() != m) throw Error(ErrorKind::InvalidModel, "beta_q must have length m");
      if ((b.array().abs() >= 1.0).any())
        throw Error(ErrorKind::InvalidModel, "beta_q entries must lie in (-1, 1)");
    }
    if ((v.array() < 0.0).any()) throw Error(ErrorKind::InvalidModel, "v must be nonnegative");
  } else {
    if (sigma2_fixed->size() != m) throw Error(ErrorKind::InvalidModel, "sigma2_fixed must have length m");
    if ((sigma2_fixed->array() <= 0.0).any())
      throw Error(ErrorKind::InvalidModel, "sigma2_fixed entries must be positive");
  }
  if (static_cast<int>(c_support.size()) != s_lag || static_cast<int>(gamma0.size()) != s_lag ||
      static_cast<int>(gamma.size()) != s_lag || static_cast<int>(u.size()) != s_lag)
    throw Error(ErrorKind::InvalidModel, "lagged parameter groups must have s_lag entries");
  for (int s = 0; s < s_lag; ++s) {
    if (c_support[s].rows() != m || c_support[s].cols() != m)
      throw Error(ErrorKind::InvalidModel, "c_support must be m x m");
    check_square(gamma0[s], m, "gamma0");
    check_square(u[s], m, "u");
    if (static_cast<int>(gamma[s].size()) != r_lag) throw Error(ErrorKind::InvalidModel, "gamma size != r_lag");
    for (const auto& g : gamma[s]) {
      check_square(g, m, "gamma_r");
      check_ar(g, "gamma_r");
    }
    if ((u[s].array() < 0.0).any()) throw Error(ErrorKind::InvalidModel, "u must be nonnegative");
  }
}

inline std::vector<double> ar_column(const std::vector<MatrixXd>& coefs, int i, int j) {
  std::vector<double> out;
  out.reserve(coefs.size());
  for (const auto& a : coefs) out.push_back(a(i, j));
  return out;
}

inline std::vector<double> ar_column(const std::vector<VectorXd>& coefs, int i) {
  std::vector<double> out;
  out.reserve(coefs.size());
  for (const auto& a : coefs) out.push_back(a(i));
  return out;
}

/// Resets every initial-state prior to the stationary law of the current AR
/// parameters. Lagged-coefficient variances are kept if `keep_c_var` is set.
inline void set_stationary_init(SemParameters& theta, bool keep_c_var = false) {
  const int m = theta.m;
  theta.init.b_mean = MatrixXd::Zero(m, m);
  theta.init.b_var = MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (!theta.b_support(i, j)) continue;
      const auto mom = initial_prior(theta.alpha0(i, j), ar_column(theta.alpha, i, j), theta.w(i, j));
      theta.init.b_mean(i, j) = mom.mean;
      theta.init.b_var(i, j) = mom.variance;
    }
  theta.init.h_mean = VectorXd::Zero(m);
  theta.init.h_var = VectorXd::Zero(m);
  if (theta.varying_noise()) {
    for (int i = 0; i < m; ++i) {
      const auto mom = initial_prior(theta.beta0(i), ar_column(theta.beta, i), theta.v(i));
      theta.init.h_mean(i) = mom.mean;
      theta.init.h_var(i) = mom.variance;
    }
  } else {
    theta.init.h_mean = theta.sigma2_fixed->array().log().matrix();
  }
  const bool keep = keep_c_var && static_cast<int>(theta.init.c_var.size()) == theta.s_lag;
  theta.init.c_mean.assign(theta.s_lag, MatrixXd::Zero(m, m));
  if (!keep) theta.init.c_var.assign(theta.s_lag, MatrixXd::Zero(m, m));
  for (int s = 0; s < theta.s_lag; ++s)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (!theta.c_support[s](i, j)) continue;
        const auto mom = initial_prior(theta.gamma0[s](i, j), ar_column(theta.gamma[s], i, j), theta.u[s](i, j));
        theta.init.c_mean[s](i, j) = mom.mean;
        if (!keep) theta.init.c_var[s](i, j) = mom.variance;
      }
}

/// Parameters with the estimator's starting values: zero intercepts, AR
/// coefficients 0.9 / order, innovation variances 0.05. `sigma2` selects the
/// constant-noise model when given.
inline SemParameters make_parameters(int m, const MatrixXi& b_support, std::optional<VectorXd> sigma2,
                                     int s_lag = 0, std::vector<MatrixXi> c_support = {},
                                     int p_lag = 1, int q_lag = 1, int r_lag = 1) {
  SemParameters th;
  th.m = m;
  th.p_lag = p_lag;
  th.q_lag = q_lag;
  th.s_lag = s_lag;
  th.r_lag = r_lag;
  th.b_support = b_support;
  th.alpha0 = MatrixXd::Zero(m, m);
  th.alpha.assign(p_lag, MatrixXd::Constant(m, m, 0.9 / p_lag));
  th.w = MatrixXd::Constant(m, m, 0.05);
  for (int i = 0; i < m; ++i) {
    th.w(i, i) = 0.0;
    for (auto& a : th.alpha) a(i, i) = 0.0;
  }
  th.sigma2_fixed = std::move(sigma2);
  th.beta0 = VectorXd::Zero(m);
  th.beta.assign(q_lag, VectorXd::Constant(m, 0.9 / q_lag));
  th.v = VectorXd::Constant(m, 0.05);
  if (c_support.empty()) c_support.assign(s_lag, MatrixXi::Zero(m, m));
  th.c_support = std::move(c_support);
  th.gamma0.assign(s_lag, MatrixXd::Zero(m, m));
  th.gamma.assign(s_lag, std::vector<MatrixXd>(r_lag, MatrixXd::Constant(m, m, 0.9 / r_lag)));
  th.u.assign(s_lag, MatrixXd::Constant(m, m, 0.05));
  set_stationary_init(th);
  th.validate();
  return th;
}

/// All off-diagonal pairs: the candidate set used when the graph is unknown.
inline MatrixXi full_support(int m) {
  MatrixXi s = MatrixXi::Ones(m, m);
  s.diagonal().setZero();
  return s;
}

/// Coefficient support (i, j) of a graph given in (from, to) orientation.
inline MatrixXi support_from_graph(const MatrixXi& adjacency) { return adjacency.transpose(); }

inline void GeneratorConfig::validate() const {
  if (m < 1) throw Error(ErrorKind::InvalidConfig, "generator m must be >= 1");
  if (T < 3) throw Error(ErrorKind::InvalidConfig, "generator T must be >= 3");
  if (!(edge_probability >= 0.0 && edge_probability <= 1.0))
    throw Error(ErrorKind::InvalidConfig, "edge_probability must lie in [0, 1]");
  for (const Range* r : {&sigma2, &w, &v, &alpha, &beta, &coef_mean, &lag_coef_mean, &gamma, &u})
    if (!(r->lo <= r->hi)) throw Error(ErrorKind::InvalidConfig, "generator range has lo > hi");
  if (sigma2.lo <= 0.0) throw Error(ErrorKind::InvalidConfig, "sigma2 range must be positive");
  if (w.lo < 0.0 || v.lo < 0.0 || u.lo < 0.0)
    throw Error(ErrorKind::InvalidConfig, "variance ranges must be nonnegative");
  for (const Range* r : {&alpha, &beta, &gamma})
    if (r->lo <= -1.0 || r->hi >= 1.0) throw Error(ErrorKind::InvalidConfig, "AR ranges must lie in (-1, 1)");
  if (scenario == Scenario::WithLags && s_lag < 1)
    throw Error(ErrorKind::InvalidConfig, "with-lags scenario needs s_lag >= 1");
}

}  // namespace tvcm
