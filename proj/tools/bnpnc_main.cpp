// bnpnc: exposure-response estimation with negative controls.
//
// Subcommands: simulate, fit, benchmark, plot, check, config.
// Exit codes: 0 success, 2 validation/config, 3 numerical/identification, 4 I/O.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bnpnc/baselines.hpp"
#include "bnpnc/config_io.hpp"
#include "bnpnc/csv.hpp"
#include "bnpnc/errors.hpp"
#include "bnpnc/manifest.hpp"
#include "bnpnc/serialize.hpp"
#include "bnpnc/simulation.hpp"
#include "bnpnc/svg_plot.hpp"
#include "bnpnc/version.hpp"

namespace fs = std::filesystem;
using namespace bnpnc;

namespace {

struct OutDir {
  fs::path dir;
  manifest::RunManifest run;

  explicit OutDir(const std::string& path, const std::string& command,
                  const std::vector<std::string>& argv) {
    dir = path;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
      throw IoError("cannot create output directory '" + path + "'");
    }
    run.command = command;
    run.argv = argv;
    run.version = kVersion;
    run.started_utc = manifest::utc_now_iso8601();
  }

  std::string file(const std::string& name) {
    run.outputs.push_back(name);
    return (dir / name).string();
  }

  void finish() {
    run.finished_utc = manifest::utc_now_iso8601();
    manifest::write_manifest((dir / "manifest.json").string(), run);
  }
};

std::vector<std::string> collect_argv(int argc, char** argv) {
  return {argv, argv + argc};
}

struct ColumnFlags {
  std::string y = "y", x = "x", z = "z", w = "w", u;
  std::vector<std::string> covariates;

  ColumnMap to_map(bool need_u) const {
    ColumnMap map;
    map.y = y;
    map.x = x;
    map.z = z;
    map.w = w;
    map.u = u;
    map.covariates = covariates;
    if (need_u && map.u.empty()) {
      map.u = "u";
    }
    return map;
  }
};

void add_column_flags(CLI::App* cmd, ColumnFlags& cols) {
  cmd->add_option("--y-col", cols.y, "outcome column name")->capture_default_str();
  cmd->add_option("--x-col", cols.x, "exposure column name")->capture_default_str();
  cmd->add_option("--z-col", cols.z, "negative-control exposure column")->capture_default_str();
  cmd->add_option("--w-col", cols.w, "negative-control outcome column")->capture_default_str();
  cmd->add_option("--u-col", cols.u, "confounder column (yxu mode / check)");
  cmd->add_option("--covariates", cols.covariates,
                  "measured covariate columns entering every regression")
      ->delimiter(',');
}

struct ConfigFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> truncation, n_knots, iterations, burn_in, thinning, grid_points;
  bool no_standardize = false;

  ModelConfig resolve() const {
    ModelConfig config;
    if (!config_path.empty()) {
      config = config_io::load_config_file(config_path);
    }
    if (seed) config.seed = *seed;
    if (truncation) config.truncation = *truncation;
    if (n_knots) config.n_knots = *n_knots;
    if (iterations) config.iterations = *iterations;
    if (burn_in) config.burn_in = *burn_in;
    if (thinning) config.thinning = *thinning;
    if (grid_points) config.grid.points = *grid_points;
    if (no_standardize) config.standardize = false;
    config.validate();
    return config;
  }
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
  cmd->add_option("--config", flags.config_path, "INI config file (flags override it)");
  cmd->add_option("--seed", flags.seed, "RNG seed (never taken from the clock)");
  cmd->add_option("-K,--truncation", flags.truncation, "mixture truncation level");
  cmd->add_option("--n-knots", flags.n_knots, "weight-model segments");
  cmd->add_option("--iterations", flags.iterations, "total MCMC sweeps");
  cmd->add_option("--burn-in", flags.burn_in, "discarded sweeps");
  cmd->add_option("--thinning", flags.thinning, "keep every t-th sweep");
  cmd->add_option("--grid-points", flags.grid_points, "CERF grid size");
  cmd->add_flag("--no-standardize", flags.no_standardize,
                "fit on the raw scale instead of standardized columns");
}

void echo_config(manifest::RunManifest& run, const ModelConfig& config) {
  for (const auto& [key, value] : config_io::config_entries(config)) {
    run.config_echo[key] = value;
  }
  run.seed = config.seed;
}

int cmd_simulate(int scenario, long long n, std::uint64_t seed, bool mask_u,
                 const std::string& out_path, const std::vector<std::string>& argv) {
  OutDir out(out_path, "simulate", argv);
  simulation::Scenario spec{scenario, static_cast<Eigen::Index>(n), seed};
  Dataset data = simulation::simulate(spec);
  if (mask_u) {
    data.u_hidden.resize(0);
  }
  save_csv(out.file("dataset.csv"), data);
  out.run.seed = seed;
  out.run.config_echo["scenario"] = std::to_string(scenario);
  out.run.config_echo["n"] = std::to_string(n);
  out.run.config_echo["mask_u"] = mask_u ? "true" : "false";
  out.finish();
  std::cout << "wrote " << (out.dir / "dataset.csv").string() << " (" << data.n() << " rows)\n";
  return 0;
}

int cmd_fit(const std::string& data_path, const std::string& mode_name, const ColumnFlags& cols,
            const ConfigFlags& cfg, int chains, int threads, int bootstrap,
            const std::string& out_path, const std::vector<std::string>& argv) {
  const auto mode = baselines::parse_fit_mode(mode_name);
  OutDir out(out_path, "fit", argv);
  out.run.input_hashes[data_path] = manifest::file_hash(data_path);

  const ColumnMap map = cols.to_map(mode == baselines::FitMode::Yxu);
  const LoadResult loaded = load_csv(data_path, map);
  if (!loaded.dropped_rows.empty()) {
    std::cerr << "note: dropped " << loaded.dropped_rows.size()
              << " rows with missing values (first at data row " << loaded.dropped_rows.front()
              << ")\n";
  }
  ModelConfig config = cfg.resolve();
  echo_config(out.run, config);
  out.run.config_echo["mode"] = mode_name;

  if (mode == baselines::FitMode::LinearNc) {
    baselines::LinearNcOptions options;
    options.tol = config.identification_tol;
    options.seed = config.seed;
    options.bootstrap = bootstrap;
    options.standardize = config.standardize;
    const auto estimate = baselines::linear_nc(loaded.data, options);
    serialize::write_linear_nc_csv(out.file("effect.csv"), estimate);
    out.finish();
    std::cout << "linear-nc effect " << format_double(estimate.estimate) << "  ["
              << format_double(estimate.ci_lower) << ", " << format_double(estimate.ci_upper)
              << "] (" << 100 * estimate.ci_level << "% bootstrap)\n";
    return 0;
  }

  baselines::FitSpec spec;
  spec.mode = mode;
  spec.config = config;
  spec.chains = chains;
  spec.threads = threads;
  const auto result = baselines::fit_cerf(loaded.data, spec);
  serialize::write_draws_csv(out.file("draws.csv"), result.draws);
  serialize::write_cerf_csv(out.file("cerf.csv"), result.cerf);
  serialize::write_fit_metadata(out.file("metadata.json"), result, spec);
  out.finish();
  std::cout << "mode " << mode_name << ": " << result.cerf.total_draws << " retained draws, "
            << result.cerf.identification_failures << " identification failures, "
            << format_double(result.runtime_seconds) << "s\n";
  return 0;
}

int cmd_benchmark(int scenario, long long n, int replicates, const ConfigFlags& cfg, int threads,
                  const std::string& out_path, const std::vector<std::string>& argv) {
  OutDir out(out_path, "benchmark", argv);
  simulation::ReplicationConfig config;
  config.scenario = scenario;
  config.n = static_cast<Eigen::Index>(n);
  config.replicates = replicates;
  config.model = cfg.resolve();
  if (cfg.config_path.empty()) {
    // default report shades: 25th-95th percentile bands around the median
    config.model.band_levels = {0.25, 0.5, 0.75, 0.95};
  }
  config.threads = threads;
  echo_config(out.run, config.model);
  out.run.config_echo["scenario"] = std::to_string(scenario);
  out.run.config_echo["n"] = std::to_string(n);
  out.run.config_echo["replicates"] = std::to_string(replicates);

  const auto report = simulation::run_replications(config);
  serialize::write_benchmark_csv(out.file("benchmark.csv"), report);
  serialize::write_benchmark_summary(out.file("summary.json"), report, config);

  svg_plot::PlotSpec plot;
  svg_plot::PlotCurve curve;
  curve.label = "bnp-nc (pooled)";
  curve.color = "#1f77b4";
  curve.grid = report.grid;
  curve.median = report.pooled_median;
  curve.levels = report.levels;
  curve.lower = report.pooled_lower;
  curve.upper = report.pooled_upper;
  plot.curves.push_back(curve);
  plot.truth_grid = report.grid;
  plot.truth = report.truth;
  plot.title = "scenario " + std::to_string(scenario);
  svg_plot::write_svg(out.file("benchmark.svg"), plot);
  out.finish();

  std::cout << "scenario " << scenario << ": pooled central RMSE "
            << format_double(report.pooled_rmse_central) << ", pooled coverage";
  for (size_t l = 0; l < report.levels.size(); ++l) {
    std::cout << "  " << 100 * report.levels[l] << "%:"
              << format_double(report.pooled_coverage_by_level[static_cast<Eigen::Index>(l)]);
  }
  std::cout << ", " << format_double(report.total_seconds) << "s total\n";
  if (!report.failed_replicates.empty()) {
    std::cerr << "warning: " << report.failed_replicates.size() << " replicates failed\n";
  }
  return 0;
}

int cmd_plot(const std::vector<std::string>& inputs, const std::string& truth_path,
             int truth_scenario, bool interpolate, const std::string& out_file,
             const std::vector<std::string>& argv) {
  if (inputs.empty()) {
    throw ConfigError("plot needs at least one exposure-response CSV");
  }
  const fs::path out_path(out_file);
  OutDir out(out_path.parent_path().empty() ? "." : out_path.parent_path().string(), "plot",
             argv);

  static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b"};
  svg_plot::PlotSpec plot;
  Eigen::VectorXd base_grid;
  for (size_t i = 0; i < inputs.size(); ++i) {
    out.run.input_hashes[inputs[i]] = manifest::file_hash(inputs[i]);
    const auto estimate = serialize::read_cerf_csv(inputs[i]);
    svg_plot::PlotCurve curve;
    curve.label = fs::path(inputs[i]).stem().string();
    curve.color = kColors[i % 5];
    // a sibling metadata.json supplies the fit mode; canonical mode colors
    const fs::path meta_path = fs::path(inputs[i]).parent_path() / "metadata.json";
    if (fs::exists(meta_path)) {
      try {
        std::ifstream meta_in(meta_path);
        nlohmann::json meta;
        meta_in >> meta;
        if (meta.contains("mode")) {
          curve.label = meta["mode"].get<std::string>();
          if (curve.label == "bnp-nc") curve.color = "#1f77b4";
          if (curve.label == "yx") curve.color = "#ff7f0e";
          if (curve.label == "yxu") curve.color = "#2ca02c";
        }
      } catch (const std::exception&) {
        // unreadable metadata falls back to the filename label
      }
    }
    curve.grid = estimate.grid;
    curve.median = estimate.bands.median;
    curve.levels = estimate.bands.levels;
    curve.lower = estimate.bands.lower;
    curve.upper = estimate.bands.upper;
    if (i == 0) {
      base_grid = estimate.grid;
    } else if (curve.grid.size() != base_grid.size() ||
               (curve.grid - base_grid).cwiseAbs().maxCoeff() > 0.0) {
      if (!interpolate) {
        throw ConfigError("'" + inputs[i] +
                          "' is on a different grid; pass --interpolate to resample onto the "
                          "first file's grid");
      }
      svg_plot::PlotCurve resampled = curve;
      resampled.grid = base_grid;
      resampled.median.setConstant(base_grid.size(), std::nan(""));
      resampled.lower.setConstant(curve.lower.rows(), base_grid.size(), std::nan(""));
      resampled.upper.setConstant(curve.upper.rows(), base_grid.size(), std::nan(""));
      for (Eigen::Index g = 0; g < base_grid.size(); ++g) {
        const double x = base_grid[g];
        if (x < curve.grid[0] || x > curve.grid[curve.grid.size() - 1]) {
          continue;  // outside this file's support
        }
        Eigen::Index j = 1;
        while (j < curve.grid.size() - 1 && curve.grid[j] < x) {
          ++j;
        }
        const double x0 = curve.grid[j - 1], x1 = curve.grid[j];
        const double t = (x1 > x0) ? (x - x0) / (x1 - x0) : 0.0;
        auto lerp = [t](double a, double b) { return a + t * (b - a); };
        resampled.median[g] = lerp(curve.median[j - 1], curve.median[j]);
        for (Eigen::Index l = 0; l < curve.lower.rows(); ++l) {
          resampled.lower(l, g) = lerp(curve.lower(l, j - 1), curve.lower(l, j));
          resampled.upper(l, g) = lerp(curve.upper(l, j - 1), curve.upper(l, j));
        }
      }
      curve = std::move(resampled);
    }
    plot.curves.push_back(std::move(curve));
  }
  if (!truth_path.empty()) {
    out.run.input_hashes[truth_path] = manifest::file_hash(truth_path);
    const auto truth = serialize::read_cerf_csv(truth_path);
    plot.truth_grid = truth.grid;
    plot.truth = truth.bands.median;
  } else if (truth_scenario >= 1) {
    plot.truth_grid = base_grid;
    plot.truth = simulation::true_cerf(truth_scenario, base_grid);
  }
  svg_plot::write_svg(out_file, plot);
  out.run.outputs.push_back(out_path.filename().string());
  out.finish();
  std::cout << "wrote " << out_file << "\n";
  return 0;
}

int cmd_check(const std::string& data_path, const ColumnFlags& cols, const std::string& out_path,
              const std::vector<std::string>& argv) {
  OutDir out(out_path, "check", argv);
  out.run.input_hashes[data_path] = manifest::file_hash(data_path);
  ColumnMap map = cols.to_map(true);
  const LoadResult loaded = load_csv(data_path, map);
  const auto tests = baselines::assumption_tests(loaded.data);
  serialize::write_assumption_csv(out.file("assumptions.csv"), tests);
  out.finish();
  std::cout << baselines::format_assumption_table(tests);
  return 0;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Exposure-response estimation with negative-control adjustment"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  const auto argv_echo = collect_argv(argc, argv);

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  int sim_scenario = 1;
  long long sim_n = 1000;
  std::uint64_t sim_seed = 20240817;
  bool sim_mask_u = false;
  std::string sim_out = "out";
  sim->add_option("--scenario", sim_scenario, "scenario id (1-4)")->required();
  sim->add_option("--n", sim_n, "sample size")->required();
  sim->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
  sim->add_flag("--mask-u", sim_mask_u, "omit the confounder column from the CSV");
  sim->add_option("--out", sim_out, "output directory")->capture_default_str();

  // fit
  auto* fit = app.add_subcommand("fit", "fit an exposure-response model to a CSV");
  std::string fit_data, fit_mode = "bnp-nc", fit_out = "out";
  int fit_chains = 1, fit_threads = 1, fit_bootstrap = 1000;
  ColumnFlags fit_cols;
  ConfigFlags fit_cfg;
  fit->add_option("--data", fit_data, "input CSV")->required();
  fit->add_option("--mode", fit_mode, "bnp-nc | yx | yxu | linear-nc")->capture_default_str();
  fit->add_option("--chains", fit_chains, "independent chains to pool")->capture_default_str();
  fit->add_option("--threads", fit_threads, "worker threads")->capture_default_str();
  fit->add_option("--bootstrap", fit_bootstrap, "bootstrap resamples (linear-nc)")
      ->capture_default_str();
  fit->add_option("--out", fit_out, "output directory")->capture_default_str();
  add_column_flags(fit, fit_cols);
  add_config_flags(fit, fit_cfg);

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "replicate a scenario and score recovery");
  int bench_scenario = 1, bench_replicates = 30, bench_threads = 1;
  long long bench_n = 2000;
  std::string bench_out = "out";
  ConfigFlags bench_cfg;
  bench->add_option("--scenario", bench_scenario, "scenario id (1-4)")->required();
  bench->add_option("--n", bench_n, "sample size per replicate")->capture_default_str();
  bench->add_option("--replicates", bench_replicates, "replicate count")->capture_default_str();
  bench->add_option("--threads", bench_threads, "parallel replicates")->capture_default_str();
  bench->add_option("--out", bench_out, "output directory")->capture_default_str();
  add_config_flags(bench, bench_cfg);

  // plot
  auto* plot = app.add_subcommand("plot", "render exposure-response CSVs as a static SVG");
  std::vector<std::string> plot_inputs;
  std::string plot_truth, plot_out = "cerf.svg";
  int plot_truth_scenario = 0;
  bool plot_interpolate = false;
  plot->add_option("inputs", plot_inputs, "exposure-response CSV files")->required();
  plot->add_option("--truth", plot_truth, "truth curve CSV (x + median columns)");
  plot->add_option("--truth-scenario", plot_truth_scenario,
                   "overlay the analytic truth of a scenario (1-4)");
  plot->add_flag("--interpolate", plot_interpolate, "resample curves onto the first grid");
  plot->add_option("--out", plot_out, "output SVG path")->capture_default_str();

  // check
  auto* check = app.add_subcommand("check", "linear partial-correlation assumption tests");
  std::string check_data, check_out = "out";
  ColumnFlags check_cols;
  check->add_option("--data", check_data, "input CSV")->required();
  check->add_option("--out", check_out, "output directory")->capture_default_str();
  add_column_flags(check, check_cols);

  // config
  auto* cfg = app.add_subcommand("config", "print configuration");
  bool cfg_defaults = false;
  std::string cfg_path;
  cfg->add_flag("--defaults", cfg_defaults, "print the default configuration");
  cfg->add_option("--file", cfg_path, "print a config file resolved against the defaults");

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed()) {
    return cmd_simulate(sim_scenario, sim_n, sim_seed, sim_mask_u, sim_out, argv_echo);
  }
  if (fit->parsed()) {
    return cmd_fit(fit_data, fit_mode, fit_cols, fit_cfg, fit_chains, fit_threads, fit_bootstrap,
                   fit_out, argv_echo);
  }
  if (bench->parsed()) {
    return cmd_benchmark(bench_scenario, bench_n, bench_replicates, bench_cfg, bench_threads,
                         bench_out, argv_echo);
  }
  if (plot->parsed()) {
    return cmd_plot(plot_inputs, plot_truth, plot_truth_scenario, plot_interpolate, plot_out,
                    argv_echo);
  }
  if (check->parsed()) {
    return cmd_check(check_data, check_cols, check_out, argv_echo);
  }
  if (cfg->parsed()) {
    ModelConfig config;
    if (!cfg_path.empty()) {
      config = config_io::load_config_file(cfg_path);
    } else if (!cfg_defaults) {
      std::cerr << "config: pass --defaults or --file\n";
      return 2;
    }
    std::cout << config_io::config_ini(config);
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const IdentificationError& e) {
    std::cerr << "identification error: " << e.what() << '\n';
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
