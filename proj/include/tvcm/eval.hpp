#pragma once

// Metrics and the synthetic benchmark driver.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "tvcm/error.hpp"
#include "tvcm/forecast.hpp"
#include "tvcm/graph.hpp"
#include "tvcm/model.hpp"
#include "tvcm/rng.hpp"
#include "tvcm/saem.hpp"
#include "tvcm/simulate.hpp"

namespace tvcm {

struct F1Result {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

/// Directed instantaneous edges compared with orientation. Two empty graphs
/// score 1.
inline F1Result f1_score(const MatrixXi& estimated, const MatrixXi& truth) {
  if (estimated.rows() != truth.rows() || estimated.cols() != truth.cols())
    throw Error(ErrorKind::InvalidInput, "graphs differ in size");
  int est = 0, tru = 0, hit = 0;
  for (int a = 0; a < truth.rows(); ++a)
    for (int b = 0; b < truth.cols(); ++b) {
      if (a == b) continue;
      est += estimated(a, b) != 0;
      tru += truth(a, b) != 0;
      hit += estimated(a, b) != 0 && truth(a, b) != 0;
    }
  F1Result r;
  if (est == 0 && tru == 0) return {1.0, 1.0, 1.0};
  r.precision = est ? static_cast<double>(hit) / est : 0.0;
  r.recall = tru ? static_cast<double>(hit) / tru : 0.0;
  r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

inline F1Result f1_score(const CausalGraph& estimated, const CausalGraph& truth) {
  return f1_score(estimated.instantaneous, truth.instantaneous);
}

inline double rmse(const std::vector<double>& pred, const std::vector<double>& actual) {
  if (pred.size() != actual.size()) throw Error(ErrorKind::InvalidInput, "rmse: length mismatch");
  if (pred.empty()) throw Error(ErrorKind::InvalidInput, "rmse: empty input");
  double s = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) s += (pred[k] - actual[k]) * (pred[k] - actual[k]);
  return std::sqrt(s / pred.size());
}

enum class Alternative { Less, Greater };

struct WilcoxonResult {
  double p_value = 1.0;
  double statistic = 0.0;  // sum of ranks of positive differences a - b
  int n = 0;               // nonzero differences
  bool exact = true;
};

/// Midranks of |d| (1-based).
inline std::vector<double> midranks(const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int x, int y) { return v[x] < v[y]; });
  std::vector<double> r(n);
  for (int k = 0; k < n;) {
    int e = k;
    while (e + 1 < n && v[idx[e + 1]] == v[idx[k]]) ++e;
    const double rank = 0.5 * (k + e) + 1.0;
    for (int q = k; q <= e; ++q) r[idx[q]] = rank;
    k = e + 1;
  }
  return r;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// One-sided signed-rank test of a against b. Less: a tends to be smaller.
/// Zero differences are dropped and ties get midranks. Exact null
/// distribution (all 2^n sign patterns) for n <= 20, otherwise the normal
/// approximation with continuity and tie corrections.
inline WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b,
                                           Alternative alt) {
  if (a.size() != b.size()) throw Error(ErrorKind::InvalidInput, "wilcoxon: length mismatch");
  if (a.size() < 5) throw Error(ErrorKind::InvalidInput, "wilcoxon: need at least 5 pairs");
  std::vector<double> d;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] - b[k] != 0.0) d.push_back(a[k] - b[k]);
  if (d.empty()) throw Error(ErrorKind::DegenerateTest, "wilcoxon: all differences are zero");
  const int n = static_cast<int>(d.size());
  std::vector<double> mag(n);
  for (int k = 0; k < n; ++k) mag[k] = std::abs(d[k]);
  const auto ranks = midranks(mag);

  WilcoxonResult res;
  res.n = n;
  for (int k = 0; k < n; ++k)
    if (d[k] > 0) res.statistic += ranks[k];

  if (n <= 20) {
    // Doubled midranks are integers; count sign patterns by their doubled W+.
    std::vector<int> r2(n);
    int total = 0;
    for (int k = 0; k < n; ++k) total += r2[k] = static_cast<int>(std::lround(2.0 * ranks[k]));
    std::vector<double> count(total + 1, 0.0);
    count[0] = 1.0;
    for (int k = 0; k < n; ++k)
      for (int s = total; s >= r2[k]; --s) count[s] += count[s - r2[k]];
    const int w2 = static_cast<int>(std::lround(2.0 * res.statistic));
    double tail = 0.0;
    for (int s = 0; s <= total; ++s)
      if (alt == Alternative::Less ? s <= w2 : s >= w2) tail += count[s];
    res.p_value = tail / std::ldexp(1.0, n);
    return res;
  }

  res.exact = false;
  const double mean = n * (n + 1) / 4.0;
  double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
  std::vector<double> sorted = mag;
  std::sort(sorted.begin(), sorted.end());
  for (int k = 0; k < n;) {
    int e = k;
    while (e + 1 < n && sorted[e + 1] == sorted[k]) ++e;
    const double t = e - k + 1;
    var -= (t * t * t - t) / 48.0;
    k = e + 1;
  }
  const double sd = std::sqrt(var);
  if (!(sd > 0.0)) throw Error(ErrorKind::DegenerateTest, "wilcoxon: zero variance");
  if (alt == Alternative::Less)
    res.p_value = normal_cdf((res.statistic - mean + 0.5) / sd);
  else
    res.p_value = 1.0 - normal_cdf((res.statistic - mean - 0.5) / sd);
  return res;
}

struct BenchmarkConfig {
  GeneratorConfig generator;
  FitConfig fit;
  std::vector<int> sample_sizes{500};
  std::vector<Scenario> scenarios{Scenario::CoefOnly};
  int replications = 1;
  double threshold = 0.05;
  bool forecast = true;
  RollingForecastOptions forecasting;
  unsigned long long seed = 1;
  unsigned threads = 1;

  void validate() const {
    if (replications < 1) throw Error(ErrorKind::InvalidConfig, "replications must be >= 1");
    if (sample_sizes.empty() || scenarios.empty()) throw Error(ErrorKind::InvalidConfig, "empty benchmark grid");
    for (int T : sample_sizes)
      if (T < 10) throw Error(ErrorKind::InvalidConfig, "sample sizes must be >= 10");
    if (!(threshold > 0.0)) throw Error(ErrorKind::InvalidConfig, "threshold must be positive");
    if (forecasting.horizon < 1) throw Error(ErrorKind::InvalidConfig, "forecast horizon must be >= 1");
    generator.validate();
    fit.validate();
  }
};

struct ReplicationRecord {
  int sample_size = 0;
  Scenario scenario = Scenario::CoefOnly;
  int replication = 0;
  bool ok = false;
  std::string error;
  double f1 = std::nan("");
  double precision = std::nan("");
  double recall = std::nan("");
  double rmse = std::nan("");        // MH forecasts, averaged over targets
  double rmse_ols = std::nan("");    // static OLS baseline
  double rmse_naive = std::nan("");  // last-value baseline
  int true_edges = 0;
  int estimated_edges = 0;
};

struct MeanStderr {
  double mean = std::nan("");
  double stderr_ = std::nan("");
  int n = 0;
};

inline MeanStderr mean_stderr(const std::vector<double>& v) {
  MeanStderr r;
  std::vector<double> x;
  for (double a : v)
    if (std::isfinite(a)) x.push_back(a);
  r.n = static_cast<int>(x.size());
  if (x.empty()) return r;
  r.mean = std::accumulate(x.begin(), x.end(), 0.0) / r.n;
  if (r.n > 1) {
    double ss = 0.0;
    for (double a : x) ss += (a - r.mean) * (a - r.mean);
    r.stderr_ = std::sqrt(ss / (r.n - 1) / r.n);
  }
  return r;
}

struct BenchmarkSummary {
  int sample_size = 0;
  Scenario scenario = Scenario::CoefOnly;
  int failures = 0;
  MeanStderr f1, rmse, rmse_ols, rmse_naive;
  double wilcoxon_mh_vs_ols = std::nan("");  // one-sided, MH smaller; NaN when not computable
};

struct BenchmarkReport {
  BenchmarkConfig config;
  std::vector<ReplicationRecord> records;
  std::vector<BenchmarkSummary> summaries;
};

/// Instance seed of one grid cell and replication.
inline std::uint64_t replication_seed(std::uint64_t base, int scenario_idx, int size_idx, int rep) {
  return derive_seed(base, static_cast<std::uint64_t>(scenario_idx), static_cast<std::uint64_t>(size_idx),
                     static_cast<std::uint64_t>(rep));
}

/// Generate, fit, threshold, score; then forecast the `horizon` rows
/// simulated beyond the fitted range for every variable.
inline ReplicationRecord run_replication(const BenchmarkConfig& cfg, int sample_size, Scenario scenario, int rep,
                                         std::uint64_t seed) {
  ReplicationRecord rec;
  rec.sample_size = sample_size;
  rec.scenario = scenario;
  rec.replication = rep;
  try {
    Rng rng(seed);
    GeneratorConfig gen = cfg.generator;
    gen.T = sample_size + (cfg.forecast ? cfg.forecasting.horizon : 0);
    gen.scenario = scenario;
    const BenchmarkInstance inst = generate_benchmark_instance(gen, rng);
    TimeSeriesDataset train;
    train.values = inst.data.values.topRows(sample_size);
    train.names = inst.data.names;

    FitConfig fc = cfg.fit;
    fc.scenario = scenario;
    fc.threads = 1;
    if (scenario == Scenario::WithLags) fc.s_lag = gen.s_lag;
    const FitResult fit = saem_fit(train, fc, rng);
    const CausalGraph g = estimate_graph(fit, cfg.threshold);
    const F1Result f = f1_score(g, inst.graph);
    rec.f1 = f.f1;
    rec.precision = f.precision;
    rec.recall = f.recall;
    rec.true_edges = inst.graph.edge_count();
    rec.estimated_edges = g.edge_count();

    if (cfg.forecast) {
      double mh = 0.0, ols = 0.0, naive = 0.0;
      for (int target = 0; target < train.m(); ++target) {
        const RollingForecast rf = rolling_forecast(fit, g, inst.data.values, target, rng, cfg.forecasting);
        mh += rmse(rf.mh, rf.actual);
        ols += rmse(rf.static_ols, rf.actual);
        naive += rmse(rf.naive, rf.actual);
      }
      rec.rmse = mh / train.m();
      rec.rmse_ols = ols / train.m();
      rec.rmse_naive = naive / train.m();
    }
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

inline BenchmarkReport run_benchmark(const BenchmarkConfig& cfg) {
  cfg.validate();
  struct Job {
    int scenario_idx, size_idx, rep;
  };
  std::vector<Job> jobs;
  for (int a = 0; a < static_cast<int>(cfg.scenarios.size()); ++a)
    for (int b = 0; b < static_cast<int>(cfg.sample_sizes.size()); ++b)
      for (int r = 0; r < cfg.replications; ++r) jobs.push_back({a, b, r});

  BenchmarkReport rep;
  rep.config = cfg;
  rep.records.resize(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t k) {
    const Job& j = jobs[k];
    rep.records[k] = run_replication(cfg, cfg.sample_sizes[j.size_idx], cfg.scenarios[j.scenario_idx], j.rep,
                                     replication_seed(cfg.seed, j.scenario_idx, j.size_idx, j.rep));
  });

  std::size_t k = 0;
  for (int a = 0; a < static_cast<int>(cfg.scenarios.size()); ++a)
    for (int b = 0; b < static_cast<int>(cfg.sample_sizes.size()); ++b) {
      BenchmarkSummary s;
      s.scenario = cfg.scenarios[a];
      s.sample_size = cfg.sample_sizes[b];
      std::vector<double> f1, mh, ols, naive;
      for (int r = 0; r < cfg.replications; ++r, ++k) {
        const auto& rec = rep.records[k];
        if (!rec.ok) {
          ++s.failures;
          continue;
        }
        f1.push_back(rec.f1);
        mh.push_back(rec.rmse);
        ols.push_back(rec.rmse_ols);
        naive.push_back(rec.rmse_naive);
      }
      s.f1 = mean_stderr(f1);
      s.rmse = mean_stderr(mh);
      s.rmse_ols = mean_stderr(ols);
      s.rmse_naive = mean_stderr(naive);
      if (cfg.forecast && mh.size() >= 5) {
        try {
          s.wilcoxon_mh_vs_ols = wilcoxon_signed_rank(mh, ols, Alternative::Less).p_value;
        } catch (const Error&) {
        }
      }
      rep.summaries.push_back(s);
    }
  return rep;
}

inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Flat table: sample_size, scenario, replication, f1, rmse.
inline std::string benchmark_table(const BenchmarkReport& rep) {
  std::ostringstream os;
  os << "sample_size\tscenario\treplication\tf1\trmse\n";
  for (const auto& r : rep.records)
    os << r.sample_size << '\t' << to_string(r.scenario) << '\t' << r.replication << '\t' << format_real(r.f1)
       << '\t' << format_real(r.rmse) << '\n';
  return os.str();
}

}  // namespace tvcm
