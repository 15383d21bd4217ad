#pragma once

// Shared synthetic systems for the test suites.

#include <algorithm>
#include <vector>

#include "support/kalman.hpp"
#include "tvcm/tvcm.hpp"

namespace fixture {

using namespace tvcm;

/// x2_t = b_t x1_t + e_t with b_t AR(1), known direction, fixed noise.
struct VaryingRegression {
  TimeSeriesDataset data;
  SemParameters theta;
  LatentTrajectory latents;
  oracle::SmootherOutput smoothed;
};

inline VaryingRegression varying_regression(int T, std::uint64_t seed, double a1 = 0.9, double w = 0.05,
                                            double sigma2 = 0.3) {
  VaryingRegression s;
  MatrixXi support = MatrixXi::Zero(2, 2);
  support(1, 0) = 1;
  s.theta = make_parameters(2, support, (VectorXd(2) << 1.0, sigma2).finished());
  s.theta.alpha[0](1, 0) = a1;
  s.theta.w(1, 0) = w;
  set_stationary_init(s.theta);
  Rng rng(seed);
  s.latents = simulate_latents(s.theta, T, rng);
  s.data = simulate_observations(s.latents, s.theta, rng);
  std::vector<double> y(T), u(T);
  for (int t = 0; t < T; ++t) {
    u[t] = s.data.values(t, 0);
    y[t] = s.data.values(t, 1);
  }
  s.smoothed = oracle::kalman_smoother(y, u, 0.0, a1, w, sigma2, s.theta.init.b_mean(1, 0), s.theta.init.b_var(1, 0));
  return s;
}

/// Chain x_{o0} -> x_{o1} -> ... along a random order o, with AR(1)
/// coefficients and constant noise variances drawn from the benchmark
/// generator's ranges.
struct Chain {
  TimeSeriesDataset data;
  SemParameters theta;
  int root = 0;
};

inline Chain random_chain(int m, int T, std::uint64_t seed, const GeneratorConfig& ranges = {}) {
  Rng rng(seed);
  std::vector<int> order(m);
  for (int k = 0; k < m; ++k) order[k] = k;
  std::shuffle(order.begin(), order.end(), rng);
  MatrixXi support = MatrixXi::Zero(m, m);
  for (int k = 1; k < m; ++k) support(order[k], order[k - 1]) = 1;
  VectorXd s2(m);
  for (int i = 0; i < m; ++i) s2(i) = uniform(rng, ranges.sigma2.lo, ranges.sigma2.hi);
  Chain c;
  c.root = order[0];
  c.theta = make_parameters(m, support, s2);
  for (int k = 1; k < m; ++k) {
    const int i = order[k], j = order[k - 1];
    const double a1 = uniform(rng, ranges.alpha.lo, ranges.alpha.hi);
    c.theta.alpha[0](i, j) = a1;
    c.theta.alpha0(i, j) = random_sign(rng) * uniform(rng, ranges.coef_mean.lo, ranges.coef_mean.hi) * (1.0 - a1);
    c.theta.w(i, j) = uniform(rng, ranges.w.lo, ranges.w.hi);
  }
  set_stationary_init(c.theta);
  const LatentTrajectory lat = simulate_latents(c.theta, T, rng);
  c.data = simulate_observations(lat, c.theta, rng);
  return c;
}

inline double rmse(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s / a.size());
}

}  // namespace fixture
