#include <gtest/gtest.h>

#include <cmath>

#include "tvcm/latent.hpp"
#include "tvcm/model.hpp"
#include "tvcm/simulate.hpp"

using namespace tvcm;

namespace {

MatrixXi adj(int m, std::initializer_list<std::pair<int, int>> edges) {
  MatrixXi g = MatrixXi::Zero(m, m);
  for (auto [a, b] : edges) g(a, b) = 1;
  return g;
}

// Brute-force multivariate normal log-density of x ~ N(A lag, A D A^T),
// A = (I - B)^{-1}.
double mvn_logpdf(const VectorXd& x, const MatrixXd& B, const VectorXd& h, const VectorXd& lag) {
  const int m = static_cast<int>(x.size());
  const MatrixXd A = (MatrixXd::Identity(m, m) - B).inverse();
  const MatrixXd S = A * h.array().exp().matrix().asDiagonal() * A.transpose();
  const VectorXd d = x - A * lag;
  Eigen::LLT<MatrixXd> llt(S);
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (m * kLogTwoPi + logdet + d.dot(llt.solve(d)));
}

}  // namespace

TEST(Acyclicity, EmptyGraphIsAcyclic) { EXPECT_TRUE(validate_acyclic(MatrixXi::Zero(3, 3))); }

TEST(Acyclicity, TwoCycleIsRejected) { EXPECT_FALSE(validate_acyclic(adj(2, {{0, 1}, {1, 0}}))); }

TEST(Acyclicity, ChainWithShortcutIsAcyclic) { EXPECT_TRUE(validate_acyclic(adj(3, {{0, 1}, {1, 2}, {0, 2}}))); }

TEST(Acyclicity, BadShapesThrow) {
  EXPECT_THROW(validate_acyclic(MatrixXi::Zero(2, 3)), Error);
  MatrixXi self = MatrixXi::Zero(2, 2);
  self(0, 0) = 1;
  EXPECT_THROW(validate_acyclic(self), Error);
  MatrixXi nonbinary = MatrixXi::Zero(2, 2);
  nonbinary(0, 1) = 2;
  EXPECT_THROW(validate_acyclic(nonbinary), Error);
}

TEST(Acyclicity, TopologicalOrderRespectsEdges) {
  const MatrixXi g = adj(4, {{3, 1}, {1, 0}, {3, 2}, {2, 0}});
  const auto order = topological_order(g);
  std::vector<int> pos(4);
  for (int k = 0; k < 4; ++k) pos[order[k]] = k;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (g(a, b)) EXPECT_LT(pos[a], pos[b]);
}

TEST(StationaryMoments, WhiteNoise) {
  const auto mo = ar_stationary_moments(0.3, 0.0, 0.7);
  EXPECT_DOUBLE_EQ(mo.mean, 0.3);
  EXPECT_DOUBLE_EQ(mo.variance, 0.7);
}

TEST(StationaryMoments, DeterministicFixedPoint) {
  const auto mo = ar_stationary_moments(0.1, 0.5, 0.0);
  EXPECT_NEAR(mo.mean, 0.2, 1e-15);
  EXPECT_EQ(mo.variance, 0.0);
}

TEST(StationaryMoments, ClosedForm) {
  const auto mo = ar_stationary_moments(0.0, 0.9, 0.05);
  EXPECT_EQ(mo.mean, 0.0);
  EXPECT_NEAR(mo.variance, 0.263158, 1e-6);
}

TEST(StationaryMoments, UnitRootThrows) {
  try {
    ar_stationary_moments(0.0, 1.0, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Nonstationary);
  }
}

TEST(StationaryMoments, ArTwoMatchesYuleWalker) {
  // AR(2): gamma0 = (1 - a2) w / ((1 + a2)((1 - a2)^2 - a1^2))
  const double a1 = 0.5, a2 = 0.3, w = 0.2;
  const auto mo = ar_stationary_moments(0.4, std::vector<double>{a1, a2}, w);
  EXPECT_NEAR(mo.mean, 0.4 / (1 - a1 - a2), 1e-12);
  EXPECT_NEAR(mo.variance, (1 - a2) * w / ((1 + a2) * ((1 - a2) * (1 - a2) - a1 * a1)), 1e-12);
}

TEST(StationaryMoments, SimulatedLatentsConverge) {
  SemParameters th = make_parameters(2, support_from_graph(adj(2, {{0, 1}})), VectorXd::Ones(2));
  th.alpha[0](1, 0) = 0.9;
  th.w(1, 0) = 0.05;
  set_stationary_init(th);
  Rng rng(3);
  const int T = 100000;
  const auto lt = simulate_latents(th, T, rng);
  double mean = 0, sq = 0;
  for (int t = 0; t < T; ++t) mean += lt.B[t](1, 0);
  mean /= T;
  for (int t = 0; t < T; ++t) sq += (lt.B[t](1, 0) - mean) * (lt.B[t](1, 0) - mean);
  const double var = sq / T;
  EXPECT_NEAR(var, 0.2632, 0.05 * 0.2632);
  // Effective sample size of an AR(1) with coefficient 0.9 is T(1-a)/(1+a).
  const double se = std::sqrt(0.2632 / (T * 0.1 / 1.9));
  EXPECT_LT(std::abs(mean), 3 * se);
}

TEST(SimulateLatents, ZeroInnovationReachesFixedPoint) {
  SemParameters th = make_parameters(2, support_from_graph(adj(2, {{0, 1}})), VectorXd::Ones(2));
  th.alpha[0](1, 0) = 0.0;
  th.alpha0(1, 0) = 0.7;
  th.w(1, 0) = 0.0;
  set_stationary_init(th);
  Rng rng(1);
  const auto lt = simulate_latents(th, 20, rng);
  for (int t = 1; t < 20; ++t) EXPECT_EQ(lt.B[t](1, 0), 0.7);
}

TEST(SimulateLatents, SeedDeterminism) {
  const SemParameters th = make_parameters(3, full_support(3), std::nullopt);
  Rng a(42), b(42);
  const auto la = simulate_latents(th, 50, a);
  const auto lb = simulate_latents(th, 50, b);
  for (int t = 0; t < 50; ++t) {
    EXPECT_EQ(la.B[t], lb.B[t]);
    EXPECT_EQ(la.h[t], lb.h[t]);
  }
}

TEST(SolveObservations, ZeroNoiseGivesZero) {
  LatentTrajectory lt;
  lt.B.assign(4, MatrixXd::Zero(3, 3));
  lt.h.assign(4, VectorXd::Zero(3));
  const MatrixXd X = solve_observations(lt, MatrixXd::Zero(4, 3));
  EXPECT_TRUE(X.isZero(0));
}

TEST(SolveObservations, TriangularHandExample) {
  LatentTrajectory lt;
  MatrixXd B = MatrixXd::Zero(2, 2);
  B(1, 0) = 0.5;
  lt.B.assign(1, B);
  lt.h.assign(1, VectorXd::Zero(2));
  const MatrixXd X = solve_observations(lt, MatrixXd::Ones(1, 2));
  EXPECT_DOUBLE_EQ(X(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(X(0, 1), 1.5);
}

TEST(SolveObservations, CyclicPatternThrows) {
  LatentTrajectory lt;
  MatrixXd B = MatrixXd::Zero(2, 2);
  B(1, 0) = 0.5;
  B(0, 1) = 0.5;
  lt.B.assign(1, B);
  lt.h.assign(1, VectorXd::Zero(2));
  try {
    solve_observations(lt, MatrixXd::Ones(1, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidModel);
  }
}

TEST(SolveObservations, ResidualsReproduceNoise) {
  Rng rng(9);
  GeneratorConfig cfg;
  cfg.T = 50;
  cfg.scenario = Scenario::WithLags;
  cfg.edge_probability = 0.6;
  const auto inst = generate_benchmark_instance(cfg, rng);
  MatrixXd noise(cfg.T, cfg.m);
  for (int t = 0; t < cfg.T; ++t)
    for (int i = 0; i < cfg.m; ++i) noise(t, i) = standard_normal(rng);
  const MatrixXd X = solve_observations(inst.latents, noise);
  const LatentLayout layout(inst.params);
  const MatrixXd Z = layout.from_trajectory(inst.latents);
  for (int t = 0; t < cfg.T; ++t) {
    const VectorXd e = layout.residuals(Z.col(t), X, t);
    for (int i = 0; i < cfg.m; ++i) EXPECT_NEAR(e(i), noise(t, i), 1e-12 * (1 + X.row(t).cwiseAbs().maxCoeff())) << "t=" << t << " i=" << i;
  }
}

TEST(Generator, ShapeAndAcyclicity) {
  Rng rng(5);
  GeneratorConfig cfg;
  const auto inst = generate_benchmark_instance(cfg, rng);
  EXPECT_EQ(inst.data.T(), 500);
  EXPECT_EQ(inst.data.m(), 5);
  EXPECT_TRUE(validate_acyclic(inst.graph.instantaneous));
}

TEST(Generator, ParametersInConfiguredRanges) {
  Rng rng(6);
  GeneratorConfig cfg;
  cfg.scenario = Scenario::CoefAndVariance;
  cfg.edge_probability = 0.8;
  const auto inst = generate_benchmark_instance(cfg, rng);
  const auto& th = inst.params;
  for (int i = 0; i < cfg.m; ++i) {
    EXPECT_GE(th.beta[0](i), 0.8);
    EXPECT_LE(th.beta[0](i), 0.998);
    EXPECT_GE(th.v(i), 0.01);
    EXPECT_LE(th.v(i), 0.1);
    for (int j = 0; j < cfg.m; ++j) {
      if (!th.b_support(i, j)) continue;
      EXPECT_GE(th.alpha[0](i, j), 0.8);
      EXPECT_LE(th.alpha[0](i, j), 0.998);
      EXPECT_GE(th.w(i, j), 0.01);
      EXPECT_LE(th.w(i, j), 0.1);
    }
  }
}

TEST(Generator, NoEdgesMeansPureNoise) {
  Rng rng(8);
  GeneratorConfig cfg;
  cfg.edge_probability = 0.0;
  cfg.T = 2000;
  const auto inst = generate_benchmark_instance(cfg, rng);
  EXPECT_EQ(inst.graph.edge_count(), 0);
  const VectorXd& s2 = *inst.params.sigma2_fixed;
  for (int i = 0; i < cfg.m; ++i) {
    const double var = inst.data.values.col(i).squaredNorm() / cfg.T;
    EXPECT_NEAR(var, s2(i), 4 * s2(i) * std::sqrt(2.0 / cfg.T));
  }
}

TEST(ObservationLoglik, StandardNormalAtZero) {
  EXPECT_NEAR(observation_loglik(VectorXd::Zero(1), MatrixXd::Zero(1, 1), VectorXd::Zero(1)), -0.9189385332, 1e-9);
}

TEST(ObservationLoglik, TwoNodeHandExample) {
  MatrixXd B = MatrixXd::Zero(2, 2);
  B(1, 0) = 2.0;
  const VectorXd x = (VectorXd(2) << 1.0, 2.0).finished();
  EXPECT_NEAR(observation_loglik(x, B, VectorXd::Zero(2)), -std::log(2 * M_PI) - 0.5, 1e-12);
}

TEST(ObservationLoglik, VarianceScaling) {
  const VectorXd h = VectorXd::Constant(1, std::log(4.0));
  EXPECT_NEAR(observation_loglik(VectorXd::Zero(1), MatrixXd::Zero(1, 1), h), -0.5 * std::log(2 * M_PI * 4), 1e-12);
}

TEST(ObservationLoglik, NonfiniteThrows) {
  VectorXd x = VectorXd::Zero(2);
  x(1) = std::nan("");
  EXPECT_THROW(observation_loglik(x, MatrixXd::Zero(2, 2), VectorXd::Zero(2)), Error);
}

TEST(ObservationLoglik, FactorizationMatchesMultivariateNormal) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + trial % 5;
    const MatrixXi g = random_dag(m, 0.6, rng);
    MatrixXd B = MatrixXd::Zero(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        if (g(a, b)) B(b, a) = uniform(rng, -1.5, 1.5);
    VectorXd h(m), x(m), lag(m);
    for (int i = 0; i < m; ++i) {
      h(i) = uniform(rng, -1.5, 1.0);
      x(i) = 2 * standard_normal(rng);
      lag(i) = standard_normal(rng);
    }
    EXPECT_NEAR(observation_loglik(x, B, h, lag), mvn_logpdf(x, B, h, lag), 1e-8);
    EXPECT_NEAR(structural_loglik(x, B, h, lag), mvn_logpdf(x, B, h, lag), 1e-8);
  }
}

TEST(StructuralLoglik, CyclicMatchesMultivariateNormal) {
  MatrixXd B(3, 3);
  B << 0, 0.4, -0.3, 0.2, 0, 0.5, -0.6, 0.1, 0;
  const VectorXd h = (VectorXd(3) << 0.1, -0.4, 0.3).finished();
  const VectorXd x = (VectorXd(3) << 0.7, -1.2, 0.4).finished();
  const VectorXd lag = VectorXd::Zero(3);
  EXPECT_NEAR(structural_loglik(x, B, h, lag), mvn_logpdf(x, B, h, lag), 1e-10);
}

TEST(Parameters, ValidationRejectsExplosiveAr) {
  SemParameters th = make_parameters(2, full_support(2), VectorXd::Ones(2));
  th.alpha[0](1, 0) = 1.0;
  EXPECT_THROW(th.validate(), Error);
}

TEST(Parameters, InitialPriorFallsBackToStandardNormal) {
  const auto mo = initial_prior(0.0, {0.5}, 0.0);
  EXPECT_EQ(mo.mean, 0.0);
  EXPECT_EQ(mo.variance, 1.0);
}

TEST(Scenario, RoundTrip) {
  for (auto s : {Scenario::CoefOnly, Scenario::CoefAndVariance, Scenario::WithLags})
    EXPECT_EQ(parse_scenario(to_string(s)), s);
  EXPECT_THROW(parse_scenario("bogus"), Error);
}
