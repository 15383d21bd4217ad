#include <gtest/gtest.h>

#include <cmath>

#include "tvcm/eval.hpp"

using namespace tvcm;

namespace {

MatrixXi adj(int m, std::initializer_list<std::pair<int, int>> list) {
  MatrixXi a = MatrixXi::Zero(m, m);
  for (auto [f, t] : list) a(f, t) = 1;
  return a;
}

// Enumerates all 2^n sign assignments of the given midranks.
double brute_wilcoxon(const std::vector<double>& a, const std::vector<double>& b, Alternative alt) {
  std::vector<double> mag;
  double w = 0.0;
  std::vector<double> d;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] != b[k]) d.push_back(a[k] - b[k]);
  for (double x : d) mag.push_back(std::abs(x));
  // Midranks computed independently by counting.
  std::vector<double> rank(mag.size());
  for (std::size_t i = 0; i < mag.size(); ++i) {
    int less = 0, equal = 0;
    for (double y : mag) {
      less += y < mag[i];
      equal += y == mag[i];
    }
    rank[i] = less + (equal + 1) / 2.0;
  }
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] > 0) w += rank[i];
  const int n = static_cast<int>(d.size());
  long hits = 0;
  for (long mask = 0; mask < (1L << n); ++mask) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) s += rank[i];
    hits += alt == Alternative::Less ? s <= w + 1e-9 : s >= w - 1e-9;
  }
  return static_cast<double>(hits) / (1L << n);
}

BenchmarkConfig tiny_benchmark() {
  BenchmarkConfig c;
  c.sample_sizes = {60, 80};
  c.replications = 2;
  c.generator.m = 3;
  c.fit.particles = 4;
  c.fit.iterations = 4;
  c.fit.burn_in = 2;
  c.forecasting.horizon = 2;
  c.forecasting.ensemble_size = 20;
  c.forecasting.mh.samples = 150;
  c.seed = 99;
  return c;
}

}  // namespace

TEST(F1, HandExamples) {
  const MatrixXi truth = adj(3, {{0, 1}, {1, 2}});
  EXPECT_DOUBLE_EQ(f1_score(truth, truth).f1, 1.0);
  // One of two true edges found, one false positive: P = R = 1/2.
  const F1Result r = f1_score(adj(3, {{0, 1}, {0, 2}}), truth);
  EXPECT_DOUBLE_EQ(r.precision, 0.5);
  EXPECT_DOUBLE_EQ(r.recall, 0.5);
  EXPECT_DOUBLE_EQ(r.f1, 0.5);
  // Reversed edges do not count.
  EXPECT_DOUBLE_EQ(f1_score(adj(3, {{1, 0}, {2, 1}}), truth).f1, 0.0);
  EXPECT_DOUBLE_EQ(f1_score(MatrixXi::Zero(3, 3), truth).f1, 0.0);
  EXPECT_DOUBLE_EQ(f1_score(MatrixXi::Zero(3, 3), MatrixXi::Zero(3, 3)).f1, 1.0);
  // P = 1, R = 1/2 -> 2/3.
  EXPECT_NEAR(f1_score(adj(3, {{0, 1}}), truth).f1, 2.0 / 3.0, 1e-15);
  EXPECT_THROW(f1_score(MatrixXi::Zero(2, 2), truth), Error);
}

TEST(Rmse, HandExamples) {
  EXPECT_DOUBLE_EQ(rmse({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(rmse({0, 0}, {3, 4}), std::sqrt(12.5));
  EXPECT_DOUBLE_EQ(rmse({1}, {-1}), 2.0);
  EXPECT_THROW(rmse({1, 2}, {1}), Error);
  EXPECT_THROW(rmse({}, {}), Error);
}

TEST(Midranks, TiesShareTheirAverageRank) {
  EXPECT_EQ(midranks({3.0, 1.0, 3.0, 2.0}), (std::vector<double>{3.5, 1.0, 3.5, 2.0}));
}

TEST(Wilcoxon, SixPositiveDifferences) {
  const std::vector<double> a{2, 3, 4, 5, 6, 7}, b(6, 0.0);
  const auto r = wilcoxon_signed_rank(a, b, Alternative::Greater);
  EXPECT_TRUE(r.exact);
  EXPECT_DOUBLE_EQ(r.statistic, 21.0);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0 / 64.0);
  EXPECT_DOUBLE_EQ(brute_wilcoxon(a, b, Alternative::Greater), 1.0 / 64.0);
  EXPECT_DOUBLE_EQ(wilcoxon_signed_rank(b, a, Alternative::Less).p_value, 1.0 / 64.0);
  EXPECT_DOUBLE_EQ(wilcoxon_signed_rank(a, b, Alternative::Less).p_value, 1.0);
}

TEST(Wilcoxon, ExactMatchesEnumeration) {
  Rng rng(71);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 5 + rep % 8;
    std::vector<double> a(n), b(n);
    for (int k = 0; k < n; ++k) {
      // Coarse grid produces ties and zero differences.
      a[k] = std::round(4 * standard_normal(rng)) / 2;
      b[k] = std::round(4 * standard_normal(rng)) / 2;
    }
    bool nonzero = false;
    for (int k = 0; k < n; ++k) nonzero |= a[k] != b[k];
    if (!nonzero) continue;
    for (auto alt : {Alternative::Less, Alternative::Greater})
      EXPECT_NEAR(wilcoxon_signed_rank(a, b, alt).p_value, brute_wilcoxon(a, b, alt), 1e-12) << "rep " << rep;
  }
}

TEST(Wilcoxon, SwappingArgumentsSwapsAlternatives) {
  Rng rng(72);
  for (int n : {8, 15, 30, 60}) {
    std::vector<double> a(n), b(n);
    for (int k = 0; k < n; ++k) {
      a[k] = standard_normal(rng);
      b[k] = standard_normal(rng) + 0.3;
    }
    EXPECT_NEAR(wilcoxon_signed_rank(a, b, Alternative::Less).p_value,
                wilcoxon_signed_rank(b, a, Alternative::Greater).p_value, 1e-12);
  }
}

TEST(Wilcoxon, NormalApproximationAgreesWithExactNearTheBoundary) {
  // n = 20 exact vs the large-sample formula evaluated on the same data.
  Rng rng(73);
  std::vector<double> a(21), b(21, 0.0);
  for (int k = 0; k < 21; ++k) a[k] = standard_normal(rng) + 0.2;
  const auto approx = wilcoxon_signed_rank(a, b, Alternative::Greater);
  EXPECT_FALSE(approx.exact);
  const auto exact = brute_wilcoxon(a, b, Alternative::Greater);
  EXPECT_NEAR(approx.p_value, exact, 0.01);
}

TEST(Wilcoxon, DegenerateInputs) {
  const std::vector<double> a{1, 2, 3, 4, 5};
  try {
    wilcoxon_signed_rank(a, a, Alternative::Less);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateTest);
  }
  EXPECT_THROW(wilcoxon_signed_rank({1, 2, 3, 4}, {0, 0, 0, 0}, Alternative::Less), Error);
  EXPECT_THROW(wilcoxon_signed_rank({1, 2, 3, 4, 5}, {0, 0, 0, 0}, Alternative::Less), Error);
}

TEST(MeanStderr, SkipsNan) {
  const MeanStderr s = mean_stderr({1.0, 3.0, std::nan("")});
  EXPECT_EQ(s.n, 2);
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_DOUBLE_EQ(s.stderr_, 1.0);
}

TEST(Benchmark, ShapeAndDeterminism) {
  const BenchmarkConfig c = tiny_benchmark();
  const BenchmarkReport a = run_benchmark(c);
  ASSERT_EQ(a.records.size(), 4u);
  ASSERT_EQ(a.summaries.size(), 2u);
  EXPECT_EQ(a.summaries[0].sample_size, 60);
  EXPECT_EQ(a.summaries[1].sample_size, 80);
  for (const auto& r : a.records) {
    EXPECT_TRUE(r.ok) << r.error;
    EXPECT_GE(r.f1, 0.0);
    EXPECT_LE(r.f1, 1.0);
    EXPECT_TRUE(std::isfinite(r.rmse));
  }
  BenchmarkConfig threaded = c;
  threaded.threads = 3;
  EXPECT_EQ(benchmark_table(a), benchmark_table(run_benchmark(c)));
  EXPECT_EQ(benchmark_table(a), benchmark_table(run_benchmark(threaded)));
  const std::string table = benchmark_table(a);
  EXPECT_EQ(table.rfind("sample_size\tscenario\treplication\tf1\trmse\n", 0), 0u);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 5);
}

TEST(Benchmark, InvalidConfigs) {
  BenchmarkConfig c = tiny_benchmark();
  c.replications = 0;
  EXPECT_THROW(run_benchmark(c), Error);
  c = tiny_benchmark();
  c.sample_sizes.clear();
  EXPECT_THROW(run_benchmark(c), Error);
  c = tiny_benchmark();
  c.threshold = 0.0;
  EXPECT_THROW(run_benchmark(c), Error);
}

TEST(Benchmark, ReplicationSeedsDiffer) {
  EXPECT_NE(replication_seed(1, 0, 0, 0), replication_seed(1, 0, 0, 1));
  EXPECT_NE(replication_seed(1, 0, 0, 0), replication_seed(1, 0, 1, 0));
  EXPECT_NE(replication_seed(1, 0, 0, 0), replication_seed(1, 1, 0, 0));
  EXPECT_NE(replication_seed(1, 0, 0, 0), replication_seed(2, 0, 0, 0));
}
