#pragma once

// Cross-time fourth-moment statistics S_i(p) = mean_t x_{i,t}^2 x_{i,t+p}^2.
// A variable that receives no changing influence has a profile flat in p.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tvcm/error.hpp"
#include "tvcm/model.hpp"

namespace tvcm {

inline void check_variable(const TimeSeriesDataset& data, int i) {
  if (i < 0 || i >= data.m()) throw Error(ErrorKind::InvalidInput, "variable index out of range");
}

inline double kurtosis_statistic(const TimeSeriesDataset& data, int i, int p) {
  check_variable(data, i);
  if (p < 1) throw Error(ErrorKind::InvalidInput, "lag must be >= 1");
  const int n = data.T() - p;
  if (n < 30) throw Error(ErrorKind::InvalidInput, "need at least 30 products, got " + std::to_string(std::max(n, 0)));
  const auto x = data.values.col(i);
  double s = 0.0;
  for (int t = 0; t < n; ++t) s += x(t) * x(t) * x(t + p) * x(t + p);
  return s / n;
}

/// S_i(0) = mean x^4, kept for inspection only (equals 3 sigma^4 for a
/// Gaussian root, not sigma^4).
inline double zero_lag_statistic(const TimeSeriesDataset& data, int i) {
  check_variable(data, i);
  if (data.T() < 30) throw Error(ErrorKind::InvalidInput, "need at least 30 samples");
  return data.values.col(i).array().pow(4).mean();
}

struct RootDetection {
  int root = 0;
  std::vector<int> tied;      // every candidate within Monte Carlo error of the best score
  MatrixXd profiles;          // m x p_max, column p-1 holds S(p)
  MatrixXd std_errors;        // m x p_max
  VectorXd zero_lag;          // m, S(0)
  VectorXd flatness;          // m
  VectorXd flatness_noise;    // m, mean relative standard error of the profile
};

/// Standard error of kurtosis_statistic(data, i, p).
inline double kurtosis_std_error(const TimeSeriesDataset& data, int i, int p) {
  const double s = kurtosis_statistic(data, i, p);
  const int n = data.T() - p;
  const auto x = data.values.col(i);
  double ss = 0.0;
  for (int t = 0; t < n; ++t) {
    const double d = x(t) * x(t) * x(t + p) * x(t + p) - s;
    ss += d * d;
  }
  return std::sqrt(ss / (n - 1) / n);
}

/// Mean absolute successive difference of a profile over its mean absolute
/// level. Zero profiles are perfectly flat.
inline double flatness_score(const VectorXd& profile) {
  const int n = static_cast<int>(profile.size());
  double diff = 0.0;
  for (int k = 1; k < n; ++k) diff += std::abs(profile(k) - profile(k - 1));
  diff /= std::max(1, n - 1);
  const double level = profile.cwiseAbs().mean();
  return level > 0.0 ? diff / level : 0.0;
}

/// Candidates whose flatness exceeds the best by at most tie_z times the sum
/// of their relative profile noise are reported as tied.
inline RootDetection detect_root(const TimeSeriesDataset& data, int p_max, double tie_z = 1.0) {
  if (p_max < 2) throw Error(ErrorKind::InvalidInput, "p_max must be >= 2");
  const int m = data.m();
  if (m < 1) throw Error(ErrorKind::InvalidInput, "dataset has no variables");
  RootDetection r;
  r.profiles.resize(m, p_max);
  r.std_errors.resize(m, p_max);
  r.zero_lag.resize(m);
  r.flatness.resize(m);
  r.flatness_noise.resize(m);
  for (int i = 0; i < m; ++i) {
    for (int p = 1; p <= p_max; ++p) {
      r.profiles(i, p - 1) = kurtosis_statistic(data, i, p);
      r.std_errors(i, p - 1) = kurtosis_std_error(data, i, p);
    }
    r.zero_lag(i) = zero_lag_statistic(data, i);
    r.flatness(i) = flatness_score(r.profiles.row(i).transpose());
    const double level = r.profiles.row(i).cwiseAbs().mean();
    r.flatness_noise(i) = level > 0.0 ? r.std_errors.row(i).mean() / level : 0.0;
  }
  r.flatness.minCoeff(&r.root);
  const double best = r.flatness(r.root);
  for (int i = 0; i < m; ++i)
    if (r.flatness(i) - best <= tie_z * (r.flatness_noise(i) + r.flatness_noise(r.root)) + 1e-12)
      r.tied.push_back(i);
  return r;
}

/// sigma_hat^2 = sqrt(S_root(p)).
inline double root_noise_variance(const TimeSeriesDataset& data, int root, int p) {
  return std::sqrt(kurtosis_statistic(data, root, p));
}

}  // namespace tvcm
