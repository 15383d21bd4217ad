#pragma once

// Command-line front end. run_subcommand is the whole program; main() only
// forwards argv and the standard streams.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tvcm/tvcm.hpp"

namespace tvcm {

struct CommonFlags {
  std::string config;
  std::optional<unsigned long long> seed;
  std::optional<unsigned> threads;
  std::optional<int> particles;
  std::optional<int> iterations;
  std::optional<double> threshold;
  std::optional<std::string> scenario;
  std::optional<double> scad_lambda;
};

inline ConfigFile resolve_config(const CommonFlags& f) {
  ConfigFile c = f.config.empty() ? ConfigFile{} : config_from_json(read_json_file(f.config));
  if (f.seed) c.seed = *f.seed;
  if (f.threads) c.fit.threads = *f.threads;
  if (f.particles) c.fit.particles = *f.particles;
  if (f.iterations) {
    c.fit.iterations = *f.iterations;
    if (c.fit.burn_in >= c.fit.iterations) c.fit.burn_in = c.fit.iterations / 2;
  }
  if (f.threshold) c.threshold = *f.threshold;
  if (f.scenario) {
    c.fit.scenario = parse_scenario(*f.scenario);
    c.generator.scenario = c.fit.scenario;
  }
  if (f.scad_lambda) c.fit.scad.lambda = *f.scad_lambda;
  c.fit.seed = c.seed;
  c.generator.seed = c.seed;
  c.benchmark.generator = c.generator;
  c.benchmark.fit = c.fit;
  c.benchmark.threshold = c.threshold;
  c.benchmark.forecasting = c.forecast;
  c.benchmark.seed = c.seed;
  c.benchmark.threads = f.threads ? *f.threads : 1;
  return c;
}

inline json result_header(const char* command, const ConfigFile& c) {
  return json{{"software", "tvcm"}, {"version", kVersion}, {"command", command}, {"seed", c.seed}};
}

/// Accepts a 1-based index or a variable name.
inline int resolve_target(const std::string& spec, const std::vector<std::string>& names) {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == spec) return static_cast<int>(k);
  try {
    std::size_t used = 0;
    const int idx = std::stoi(spec, &used);
    if (used == spec.size() && idx >= 1 && idx <= static_cast<int>(names.size())) return idx - 1;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::Usage, "unknown target '" + spec + "'");
}

inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-")
    out << text;
  else
    write_text(path, text);
}

inline void add_common(CLI::App* cmd, CommonFlags& f, bool fit_flags) {
  cmd->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--threads", f.threads, "worker threads");
  cmd->add_option("--scenario", f.scenario, "coef-only | coef-and-variance | with-lags");
  if (!fit_flags) return;
  cmd->add_option("--particles", f.particles, "particles per sweep (default 15)");
  cmd->add_option("--iterations", f.iterations, "SAEM iterations");
  cmd->add_option("--threshold", f.threshold, "edge threshold on |mean| and variance (default 0.05)");
  cmd->add_option("--scad-lambda", f.scad_lambda, "SCAD penalty level (0 disables)");
}

inline int run_subcommand(int argc, const char* const* argv, std::ostream& out = std::cout,
                          std::ostream& err = std::cerr) {
  CLI::App app{"Time-varying causal model estimation and forecasting", "tvcm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  CommonFlags sim_f, fit_f, fc_f, bench_f, orc_f;
  std::string sim_out, sim_truth;
  std::optional<int> sim_T, sim_m;
  auto* sim = app.add_subcommand("simulate", "draw a synthetic dataset");
  add_common(sim, sim_f, false);
  sim->add_option("--out", sim_out, "output CSV")->required();
  sim->add_option("--truth", sim_truth, "write ground truth (graph, parameters) as JSON");
  sim->add_option("--T", sim_T, "series length");
  sim->add_option("--m", sim_m, "number of variables");

  std::string fit_data, fit_out;
  auto* fit = app.add_subcommand("fit", "estimate graph, coefficients and noise variances");
  add_common(fit, fit_f, true);
  fit->add_option("--data", fit_data, "input CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--out", fit_out, "result JSON (default stdout)");

  std::string fc_model, fc_data, fc_out, fc_target;
  std::optional<int> fc_mh, fc_steps;
  auto* fc = app.add_subcommand("forecast", "one-step-ahead forecasts from a fitted model");
  add_common(fc, fc_f, false);
  fc->add_option("--model", fc_model, "result JSON written by fit")->required()->check(CLI::ExistingFile);
  fc->add_option("--data", fc_data, "CSV holding the fitted rows followed by new rows")
      ->required()
      ->check(CLI::ExistingFile);
  fc->add_option("--target", fc_target, "target variable (1-based index or name)")->required();
  fc->add_option("--mh-samples", fc_mh, "Metropolis-Hastings samples (default 2000)");
  fc->add_option("--steps", fc_steps, "number of steps (default: every row past the fitted range)");
  fc->add_option("--out", fc_out, "also write a JSON report");

  std::string orc_data, orc_out;
  int p_max = 5;
  auto* orc = app.add_subcommand("oracle-root", "cross-time kurtosis root detection");
  add_common(orc, orc_f, false);
  orc->add_option("--data", orc_data, "input CSV")->required()->check(CLI::ExistingFile);
  orc->add_option("--p-max", p_max, "largest lag of the kurtosis profile (default 5)");
  orc->add_option("--out", orc_out, "result JSON (default stdout)");

  std::string bench_out, bench_table;
  std::optional<int> bench_reps;
  auto* bench = app.add_subcommand("benchmark", "synthetic benchmark: F1 and forecast RMSE");
  add_common(bench, bench_f, true);
  bench->add_option("--out", bench_out, "report JSON (default stdout)");
  bench->add_option("--table", bench_table, "flat TSV table");
  bench->add_option("--replications", bench_reps, "replications per grid cell");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (sim->parsed()) {
      ConfigFile c = resolve_config(sim_f);
      if (sim_T) c.generator.T = *sim_T;
      if (sim_m) c.generator.m = *sim_m;
      Rng rng(c.seed);
      const BenchmarkInstance inst = generate_benchmark_instance(c.generator, rng);
      save_csv(sim_out, inst.data);
      if (!sim_truth.empty()) {
        json j = result_header("simulate", c);
        j["config"] = json{{"generator", to_json(c.generator)}};
        j["graph"] = to_json(inst.graph);
        j["parameters"] = to_json(inst.params);
        write_text(sim_truth, j.dump(2) + "\n");
      }
      return 0;
    }

    if (fit->parsed()) {
      const ConfigFile c = resolve_config(fit_f);
      const TimeSeriesDataset data = load_csv(fit_data);
      Rng rng(c.seed);
      const FitResult res = saem_fit(data, c.fit, rng);
      std::vector<std::pair<int, int>> removed;
      const CausalGraph g = estimate_graph(res, c.threshold, &removed);
      json j = result_header("fit", c);
      j["config"] = json{{"fit", to_json(c.fit)}, {"threshold", c.threshold}};
      j["data"] = json{{"path", fit_data}, {"T", data.T()}, {"names", data.names}};
      j["parameters"] = to_json(res.params);
      j["graph"] = to_json(g);
      j["latent_summaries"] = latent_summaries_json(res, data.names);
      j["diagnostics"] = diagnostics_json(res, removed);
      j["forecast_state"] = to_json(forecast_state(res));
      emit(fit_out, j.dump(2) + "\n", out);
      return 0;
    }

    if (fc->parsed()) {
      ConfigFile c = resolve_config(fc_f);
      const json model = read_json_file(fc_model);
      const SemParameters theta = parameters_from_json(model.at("parameters"));
      const CausalGraph g = graph_from_json(model.at("graph"));
      const ForecastState st = forecast_state_from_json(model.at("forecast_state"));
      const TimeSeriesDataset data = load_csv(fc_data);
      if (data.m() != theta.m) throw Error(ErrorKind::InvalidInput, "data width differs from the fitted model");
      RollingForecastOptions opts = c.forecast;
      if (fc_mh) opts.mh.samples = *fc_mh;
      opts.horizon = fc_steps ? *fc_steps : data.T() - st.T;
      if (opts.horizon < 1) throw Error(ErrorKind::InvalidInput, "data has no rows beyond the fitted range");
      const int target = resolve_target(fc_target, data.names);
      Rng rng(c.seed);
      const LatentLayout layout(theta);
      const RollingForecast rf = rolling_forecast(theta, layout, g, st, data.values, target, rng, opts);
      std::ostringstream os;
      for (double v : rf.mh) os << format_real(v) << "\n";
      out << os.str();
      if (!fc_out.empty()) {
        json j = result_header("forecast", c);
        j["config"] = json{{"forecast", to_json(opts)}, {"model", fc_model}, {"data", fc_data}};
        j["target"] = data.names[target];
        j["forecast"] = rf.mh;
        j["actual"] = rf.actual;
        j["static_ols"] = rf.static_ols;
        j["naive"] = rf.naive;
        j["acceptance_rate"] = rf.acceptance;
        write_text(fc_out, j.dump(2) + "\n");
      }
      return 0;
    }

    if (orc->parsed()) {
      const ConfigFile c = resolve_config(orc_f);
      const TimeSeriesDataset data = load_csv(orc_data);
      const RootDetection r = detect_root(data, p_max);
      json tied = json::array();
      for (int i : r.tied) tied.push_back(data.names[i]);
      json j = result_header("oracle-root", c);
      j["config"] = json{{"p_max", p_max}, {"data", orc_data}};
      j["root"] = data.names[r.root];
      j["root_index"] = r.root + 1;
      j["tied"] = tied;
      j["root_noise_variance"] = root_noise_variance(data, r.root, 1);
      j["profiles"] = matrix_json(r.profiles);
      j["zero_lag_statistic"] = vector_json(r.zero_lag);
      j["flatness"] = vector_json(r.flatness);
      emit(orc_out, j.dump(2) + "\n", out);
      return 0;
    }

    if (bench->parsed()) {
      ConfigFile c = resolve_config(bench_f);
      if (bench_reps) c.benchmark.replications = *bench_reps;
      if (bench_f.scenario) c.benchmark.scenarios = {parse_scenario(*bench_f.scenario)};
      const BenchmarkReport rep = run_benchmark(c.benchmark);
      json j = result_header("benchmark", c);
      j["report"] = to_json(rep);
      emit(bench_out, j.dump(2) + "\n", out);
      if (!bench_table.empty()) write_text(bench_table, benchmark_table(rep));
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::Usage ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace tvcm
