#pragma once

// CSV datasets and JSON (de)serialization of configs, parameters and results.

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tvcm/error.hpp"
#include "tvcm/eval.hpp"
#include "tvcm/forecast.hpp"
#include "tvcm/model.hpp"
#include "tvcm/saem.hpp"

namespace tvcm {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// CSV

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Header row gives variable names; each following row is one time step.
inline TimeSeriesDataset parse_csv(std::istream& in, const std::string& source = "<input>") {
  std::string line;
  if (!std::getline(in, line) || trim(line).empty())
    throw Error(ErrorKind::Parse, source + ": empty file");
  TimeSeriesDataset ds;
  for (auto& c : split_csv_line(line)) ds.names.push_back(trim(c));
  const int m = static_cast<int>(ds.names.size());
  std::vector<std::vector<double>> rows;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != m)
      throw Error(ErrorKind::Parse, source + ": row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                                        " cells, expected " + std::to_string(m));
    std::vector<double> vals(m);
    for (int c = 0; c < m; ++c) {
      const std::string cell = trim(cells[c]);
      std::size_t used = 0;
      bool bad = cell.empty();
      if (!bad) {
        try {
          vals[c] = std::stod(cell, &used);
        } catch (const std::exception&) {
          bad = true;
        }
      }
      if (bad || used != cell.size() || !std::isfinite(vals[c]))
        throw Error(ErrorKind::Parse, source + ": row " + std::to_string(row) + ", column " + std::to_string(c + 1) +
                                          ": not a finite number: '" + cell + "'");
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw Error(ErrorKind::Parse, source + ": no data rows");
  ds.values.resize(static_cast<Eigen::Index>(rows.size()), m);
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (int c = 0; c < m; ++c) ds.values(static_cast<Eigen::Index>(t), c) = rows[t][c];
  return ds;
}

inline TimeSeriesDataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, path + ": cannot open");
  return parse_csv(in, path);
}

inline void write_csv(std::ostream& out, const TimeSeriesDataset& ds) {
  for (int c = 0; c < ds.m(); ++c) out << (c ? "," : "") << ds.names[c];
  out << '\n';
  for (int t = 0; t < ds.T(); ++t) {
    for (int c = 0; c < ds.m(); ++c) out << (c ? "," : "") << format_real(ds.values(t, c));
    out << '\n';
  }
}

inline void save_csv(const std::string& path, const TimeSeriesDataset& ds) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidInput, path + ": cannot write");
  write_csv(out, ds);
}

// ---------------------------------------------------------------------------
// JSON helpers

template <typename Derived>
json matrix_json(const Eigen::MatrixBase<Derived>& M) {
  json a = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    a.push_back(std::move(row));
  }
  return a;
}

template <typename Derived>
json vector_json(const Eigen::MatrixBase<Derived>& v) {
  json a = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, "expected a matrix (array of rows)");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols)
      throw Error(ErrorKind::Parse, "ragged matrix row " + std::to_string(r));
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = j[r][c].get<Scalar>();
  }
  return M;
}

inline VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, "expected a vector");
  VectorXd v(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  return v;
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j[key].is_null()) out = j[key].get<T>();
}

inline json range_json(const Range& r) { return json::array({r.lo, r.hi}); }

inline void read_range(const json& j, const char* key, Range& r) {
  if (!j.contains(key)) return;
  const auto& a = j[key];
  if (!a.is_array() || a.size() != 2) throw Error(ErrorKind::Parse, std::string(key) + ": expected [lo, hi]");
  r.lo = a[0].get<double>();
  r.hi = a[1].get<double>();
}

// ---------------------------------------------------------------------------
// Configs

inline json to_json(const GeneratorConfig& c) {
  return json{{"m", c.m},
              {"T", c.T},
              {"edge_probability", c.edge_probability},
              {"scenario", to_string(c.scenario)},
              {"s_lag", c.s_lag},
              {"sigma2", range_json(c.sigma2)},
              {"w", range_json(c.w)},
              {"v", range_json(c.v)},
              {"alpha", range_json(c.alpha)},
              {"beta", range_json(c.beta)},
              {"coef_mean", range_json(c.coef_mean)},
              {"lag_coef_mean", range_json(c.lag_coef_mean)},
              {"gamma", range_json(c.gamma)},
              {"u", range_json(c.u)}};
}

inline GeneratorConfig generator_from_json(const json& j, GeneratorConfig c = {}) {
  read_opt(j, "m", c.m);
  read_opt(j, "T", c.T);
  read_opt(j, "edge_probability", c.edge_probability);
  if (j.contains("scenario")) c.scenario = parse_scenario(j["scenario"].get<std::string>());
  read_opt(j, "s_lag", c.s_lag);
  read_range(j, "sigma2", c.sigma2);
  read_range(j, "w", c.w);
  read_range(j, "v", c.v);
  read_range(j, "alpha", c.alpha);
  read_range(j, "beta", c.beta);
  read_range(j, "coef_mean", c.coef_mean);
  read_range(j, "lag_coef_mean", c.lag_coef_mean);
  read_range(j, "gamma", c.gamma);
  read_range(j, "u", c.u);
  return c;
}

inline json to_json(const FitConfig& c) {
  return json{{"particles", c.particles},
              {"iterations", c.iterations},
              {"burn_in", c.burn_in},
              {"kappa", c.kappa},
              {"scenario", to_string(c.scenario)},
              {"p_lag", c.p_lag},
              {"q_lag", c.q_lag},
              {"s_lag", c.s_lag},
              {"r_lag", c.r_lag},
              {"scad_lambda", c.scad.lambda},
              {"scad_a", c.scad.a},
              {"tolerance", c.tolerance},
              {"summary_window", c.summary_window}};
}

inline FitConfig fit_config_from_json(const json& j, FitConfig c = {}) {
  read_opt(j, "particles", c.particles);
  read_opt(j, "iterations", c.iterations);
  read_opt(j, "burn_in", c.burn_in);
  read_opt(j, "kappa", c.kappa);
  if (j.contains("scenario")) c.scenario = parse_scenario(j["scenario"].get<std::string>());
  read_opt(j, "p_lag", c.p_lag);
  read_opt(j, "q_lag", c.q_lag);
  read_opt(j, "s_lag", c.s_lag);
  read_opt(j, "r_lag", c.r_lag);
  read_opt(j, "scad_lambda", c.scad.lambda);
  read_opt(j, "scad_a", c.scad.a);
  read_opt(j, "tolerance", c.tolerance);
  read_opt(j, "summary_window", c.summary_window);
  return c;
}

inline json to_json(const RollingForecastOptions& o) {
  return json{{"horizon", o.horizon}, {"ensemble_size", o.ensemble_size}, {"mh_samples", o.mh.samples}};
}

inline RollingForecastOptions forecast_options_from_json(const json& j, RollingForecastOptions o = {}) {
  read_opt(j, "horizon", o.horizon);
  read_opt(j, "ensemble_size", o.ensemble_size);
  read_opt(j, "mh_samples", o.mh.samples);
  return o;
}

inline json to_json(const BenchmarkConfig& c) {
  json scen = json::array();
  for (auto s : c.scenarios) scen.push_back(to_string(s));
  return json{{"sample_sizes", c.sample_sizes},
              {"scenarios", scen},
              {"replications", c.replications},
              {"threshold", c.threshold},
              {"forecast", c.forecast},
              {"forecasting", to_json(c.forecasting)},
              {"generator", to_json(c.generator)},
              {"fit", to_json(c.fit)}};
}

/// Top-level config document: {"seed", "threshold", "generator", "fit",
/// "forecast", "benchmark"}; every section and key is optional.
struct ConfigFile {
  unsigned long long seed = 1;
  double threshold = 0.05;
  GeneratorConfig generator;
  FitConfig fit;
  RollingForecastOptions forecast;
  BenchmarkConfig benchmark;
};

inline ConfigFile config_from_json(const json& j) {
  ConfigFile c;
  try {
    read_opt(j, "seed", c.seed);
    read_opt(j, "threshold", c.threshold);
    if (j.contains("generator")) c.generator = generator_from_json(j["generator"]);
    if (j.contains("fit")) c.fit = fit_config_from_json(j["fit"]);
    if (j.contains("forecast")) c.forecast = forecast_options_from_json(j["forecast"]);
    c.benchmark.generator = c.generator;
    c.benchmark.fit = c.fit;
    c.benchmark.forecasting = c.forecast;
    c.benchmark.threshold = c.threshold;
    if (j.contains("benchmark")) {
      const auto& b = j["benchmark"];
      read_opt(b, "sample_sizes", c.benchmark.sample_sizes);
      read_opt(b, "replications", c.benchmark.replications);
      read_opt(b, "forecast", c.benchmark.forecast);
      if (b.contains("scenarios")) {
        c.benchmark.scenarios.clear();
        for (const auto& s : b["scenarios"]) c.benchmark.scenarios.push_back(parse_scenario(s.get<std::string>()));
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("config: ") + e.what());
  }
  return c;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, path + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Parameters, graphs, results

inline json to_json(const SemParameters& th) {
  json j{{"m", th.m},       {"p_lag", th.p_lag}, {"q_lag", th.q_lag}, {"s_lag", th.s_lag},
         {"r_lag", th.r_lag}, {"b_support", matrix_json(th.b_support)}};
  j["alpha0"] = matrix_json(th.alpha0);
  j["alpha"] = json::array();
  for (const auto& a : th.alpha) j["alpha"].push_back(matrix_json(a));
  j["w"] = matrix_json(th.w);
  j["beta0"] = vector_json(th.beta0);
  j["beta"] = json::array();
  for (const auto& b : th.beta) j["beta"].push_back(vector_json(b));
  j["v"] = vector_json(th.v);
  j["sigma2_fixed"] = th.sigma2_fixed ? vector_json(*th.sigma2_fixed) : json(nullptr);
  j["c_support"] = json::array();
  j["gamma0"] = json::array();
  j["gamma"] = json::array();
  j["u"] = json::array();
  for (int s = 0; s < th.s_lag; ++s) {
    j["c_support"].push_back(matrix_json(th.c_support[s]));
    j["gamma0"].push_back(matrix_json(th.gamma0[s]));
    json g = json::array();
    for (const auto& gr : th.gamma[s]) g.push_back(matrix_json(gr));
    j["gamma"].push_back(g);
    j["u"].push_back(matrix_json(th.u[s]));
  }
  json init{{"b_mean", matrix_json(th.init.b_mean)},
            {"b_var", matrix_json(th.init.b_var)},
            {"h_mean", vector_json(th.init.h_mean)},
            {"h_var", vector_json(th.init.h_var)},
            {"c_mean", json::array()},
            {"c_var", json::array()}};
  for (int s = 0; s < th.s_lag; ++s) {
    init["c_mean"].push_back(matrix_json(th.init.c_mean[s]));
    init["c_var"].push_back(matrix_json(th.init.c_var[s]));
  }
  j["init"] = init;
  return j;
}

inline SemParameters parameters_from_json(const json& j) {
  SemParameters th;
  try {
    th.m = j.at("m").get<int>();
    th.p_lag = j.at("p_lag").get<int>();
    th.q_lag = j.at("q_lag").get<int>();
    th.s_lag = j.at("s_lag").get<int>();
    th.r_lag = j.at("r_lag").get<int>();
    th.b_support = matrix_from_json<int>(j.at("b_support"));
    th.alpha0 = matrix_from_json<double>(j.at("alpha0"));
    for (const auto& a : j.at("alpha")) th.alpha.push_back(matrix_from_json<double>(a));
    th.w = matrix_from_json<double>(j.at("w"));
    th.beta0 = vector_from_json(j.at("beta0"));
    for (const auto& b : j.at("beta")) th.beta.push_back(vector_from_json(b));
    th.v = vector_from_json(j.at("v"));
    if (!j.at("sigma2_fixed").is_null()) th.sigma2_fixed = vector_from_json(j["sigma2_fixed"]);
    for (int s = 0; s < th.s_lag; ++s) {
      th.c_support.push_back(matrix_from_json<int>(j.at("c_support")[s]));
      th.gamma0.push_back(matrix_from_json<double>(j.at("gamma0")[s]));
      std::vector<MatrixXd> g;
      for (const auto& gr : j.at("gamma")[s]) g.push_back(matrix_from_json<double>(gr));
      th.gamma.push_back(std::move(g));
      th.u.push_back(matrix_from_json<double>(j.at("u")[s]));
    }
    const auto& init = j.at("init");
    th.init.b_mean = matrix_from_json<double>(init.at("b_mean"));
    th.init.b_var = matrix_from_json<double>(init.at("b_var"));
    th.init.h_mean = vector_from_json(init.at("h_mean"));
    th.init.h_var = vector_from_json(init.at("h_var"));
    for (int s = 0; s < th.s_lag; ++s) {
      th.init.c_mean.push_back(matrix_from_json<double>(init.at("c_mean")[s]));
      th.init.c_var.push_back(matrix_from_json<double>(init.at("c_var")[s]));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("parameters: ") + e.what());
  }
  th.validate();
  return th;
}

inline json to_json(const CausalGraph& g) {
  json j{{"adjacency", matrix_json(g.instantaneous)}, {"edge_scores", matrix_json(g.edge_scores)}};
  j["lagged"] = json::array();
  j["lagged_scores"] = json::array();
  for (std::size_t s = 0; s < g.lagged.size(); ++s) {
    j["lagged"].push_back(matrix_json(g.lagged[s]));
    j["lagged_scores"].push_back(matrix_json(g.lagged_scores[s]));
  }
  return j;
}

inline CausalGraph graph_from_json(const json& j) {
  CausalGraph g;
  try {
    g.instantaneous = matrix_from_json<int>(j.at("adjacency"));
    g.edge_scores = matrix_from_json<double>(j.at("edge_scores"));
    if (j.contains("lagged"))
      for (std::size_t s = 0; s < j["lagged"].size(); ++s) {
        g.lagged.push_back(matrix_from_json<int>(j["lagged"][s]));
        g.lagged_scores.push_back(matrix_from_json<double>(j["lagged_scores"][s]));
      }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("graph: ") + e.what());
  }
  return g;
}

inline std::string slot_name(const LatentSlot& s, const std::vector<std::string>& names) {
  switch (s.kind) {
    case SlotKind::Coef:
      return "b[" + names[s.j] + "->" + names[s.i] + "]";
    case SlotKind::LogVar:
      return "h[" + names[s.i] + "]";
    case SlotKind::Lagged:
      return "c" + std::to_string(s.lag + 1) + "[" + names[s.j] + "->" + names[s.i] + "]";
  }
  return "?";
}

inline json latent_summaries_json(const FitResult& fit, const std::vector<std::string>& names) {
  json a = json::array();
  for (int d = 0; d < fit.layout.dim(); ++d) {
    const auto& s = fit.layout.slot(d);
    a.push_back(json{{"name", slot_name(s, names)},
                     {"kind", s.kind == SlotKind::Coef ? "coef" : s.kind == SlotKind::LogVar ? "logvar" : "lagged"},
                     {"to", s.i},
                     {"from", s.j},
                     {"lag", s.kind == SlotKind::Lagged ? s.lag + 1 : 0},
                     {"mean", vector_json(fit.posterior_mean.row(d))},
                     {"variance", vector_json(fit.posterior_var.row(d))}});
  }
  return a;
}

inline json to_json(const ForecastState& st) {
  json w = json::array();
  for (const auto& W : st.windows) w.push_back(matrix_json(W));
  return json{{"T", st.T}, {"weights", vector_json(st.weights)}, {"windows", w}};
}

inline ForecastState forecast_state_from_json(const json& j) {
  ForecastState st;
  try {
    st.T = j.at("T").get<int>();
    st.weights = vector_from_json(j.at("weights"));
    for (const auto& w : j.at("windows")) st.windows.push_back(matrix_from_json<double>(w));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("forecast_state: ") + e.what());
  }
  if (static_cast<int>(st.windows.size()) != st.weights.size())
    throw Error(ErrorKind::Parse, "forecast_state: weights and windows differ in count");
  return st;
}

inline json diagnostics_json(const FitResult& fit, const std::vector<std::pair<int, int>>& removed) {
  json rem = json::array();
  for (auto [a, b] : removed) rem.push_back(json::array({a, b}));
  return json{{"iterations_run", fit.diagnostics.iterations_run},
              {"q_trace", fit.q_trace},
              {"mean_ess", fit.diagnostics.mean_ess},
              {"ancestor_fallbacks", fit.diagnostics.ancestor_fallbacks},
              {"clamped_estimates", fit.diagnostics.clamped_estimates},
              {"removed_cycle_edges", rem},
              {"warnings", fit.diagnostics.warnings}};
}

inline json to_json(const ReplicationRecord& r) {
  return json{{"sample_size", r.sample_size},
              {"scenario", to_string(r.scenario)},
              {"replication", r.replication},
              {"ok", r.ok},
              {"error", r.error},
              {"f1", r.f1},
              {"precision", r.precision},
              {"recall", r.recall},
              {"rmse", r.rmse},
              {"rmse_static_ols", r.rmse_ols},
              {"rmse_naive", r.rmse_naive},
              {"true_edges", r.true_edges},
              {"estimated_edges", r.estimated_edges}};
}

inline json to_json(const MeanStderr& s) { return json{{"mean", s.mean}, {"stderr", s.stderr_}, {"n", s.n}}; }

inline json to_json(const BenchmarkReport& rep) {
  json recs = json::array(), sums = json::array();
  for (const auto& r : rep.records) recs.push_back(to_json(r));
  for (const auto& s : rep.summaries)
    sums.push_back(json{{"sample_size", s.sample_size},
                        {"scenario", to_string(s.scenario)},
                        {"failures", s.failures},
                        {"f1", to_json(s.f1)},
                        {"rmse", to_json(s.rmse)},
                        {"rmse_static_ols", to_json(s.rmse_ols)},
                        {"rmse_naive", to_json(s.rmse_naive)},
                        {"wilcoxon_p_mh_less_than_ols", s.wilcoxon_mh_vs_ols}});
  return json{{"config", to_json(rep.config)},
              {"summaries", sums},
              {"replications", recs},
              {"baselines_note", "static_ols and naive are built-in reference forecasters"}};
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidInput, path + ": cannot write");
  out << text;
}

}  // namespace tvcm
