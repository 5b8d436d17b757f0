#include "bnpnc/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "bnpnc/config_io.hpp"
#include "bnpnc/csv.hpp"
#include "bnpnc/errors.hpp"

namespace bnpnc {
namespace serialize {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  return out;
}

std::string level_tag(double level) {
  // 0.95 -> "95"; fractional percents keep their digits (0.925 -> "92.5").
  const double pct = 100.0 * level;
  const double rounded = std::round(pct);
  if (std::fabs(pct - rounded) < 1e-9) {
    return std::to_string(static_cast<long long>(rounded));
  }
  return format_double(pct);
}

nlohmann::json config_json(const ModelConfig& config) {
  nlohmann::json echo;
  for (const auto& [key, value] : config_io::config_entries(config)) {
    echo[key] = value;
  }
  return echo;
}

}  // namespace

void write_draws_csv(const std::string& path, const std::vector<gibbs::Draw>& draws) {
  if (draws.empty()) {
    throw NumericalError("no draws to write");
  }
  auto out = open_out(path);
  const auto& first = draws.front();
  const Eigen::Index K = first.theta_y.rows();
  const Eigen::Index d = first.theta_y.cols();
  const Eigen::Index nv = first.eta.cols();
  const Eigen::Index dw = first.theta_w.size();

  bool lead = true;
  auto emit = [&](const std::string& name) {
    if (!lead) {
      out << ',';
    }
    out << name;
    lead = false;
  };
  for (Eigen::Index k = 1; k <= K; ++k) {
    for (Eigen::Index j = 0; j < d; ++j) {
      emit("theta_y." + std::to_string(k) + "." + std::to_string(j));
    }
  }
  for (Eigen::Index k = 1; k <= K; ++k) {
    emit("sigma_y." + std::to_string(k));
  }
  for (Eigen::Index k = 1; k <= K; ++k) {
    for (Eigen::Index v = 0; v < nv; ++v) {
      emit("eta." + std::to_string(k) + "." + std::to_string(v));
    }
  }
  for (Eigen::Index j = 0; j < dw; ++j) {
    emit("theta_w." + std::to_string(j));
  }
  if (dw > 0) {
    emit("sigma_w");
  }
  out << '\n';

  for (const auto& draw : draws) {
    bool first_cell = true;
    auto cell = [&](double v) {
      if (!first_cell) {
        out << ',';
      }
      out << format_double(v);
      first_cell = false;
    };
    for (Eigen::Index k = 0; k < K; ++k) {
      for (Eigen::Index j = 0; j < d; ++j) {
        cell(draw.theta_y(k, j));
      }
    }
    for (Eigen::Index k = 0; k < K; ++k) {
      cell(draw.sigma_y[k]);
    }
    for (Eigen::Index k = 0; k < K; ++k) {
      for (Eigen::Index v = 0; v < nv; ++v) {
        cell(draw.eta(k, v));
      }
    }
    for (Eigen::Index j = 0; j < dw; ++j) {
      cell(draw.theta_w[j]);
    }
    if (dw > 0) {
      cell(draw.sigma_w);
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("write to '" + path + "' failed");
  }
}

void write_cerf_csv(const std::string& path, const identification::CerfEstimate& estimate) {
  auto out = open_out(path);
  const auto& bands = estimate.bands;
  out << "x,median";
  for (double level : bands.levels) {
    out << ",lo_" << level_tag(level) << ",hi_" << level_tag(level);
  }
  out << '\n';
  for (Eigen::Index g = 0; g < estimate.grid.size(); ++g) {
    out << format_double(estimate.grid[g]) << ',' << format_double(bands.median[g]);
    for (Eigen::Index l = 0; l < static_cast<Eigen::Index>(bands.levels.size()); ++l) {
      out << ',' << format_double(bands.lower(l, g)) << ',' << format_double(bands.upper(l, g));
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("write to '" + path + "' failed");
  }
}

identification::CerfEstimate read_cerf_csv(const std::string& path) {
  const CsvTable table = read_csv_table(path);
  if (table.rows.empty()) {
    throw ValidationError("'" + path + "' holds no grid rows");
  }
  identification::CerfEstimate est;
  const Eigen::Index xcol = table.column("x");
  const Eigen::Index mcol = table.column("median");
  std::vector<std::pair<double, std::pair<Eigen::Index, Eigen::Index>>> levels;
  for (size_t j = 0; j < table.header.size(); ++j) {
    const std::string& name = table.header[j];
    if (name.rfind("lo_", 0) == 0) {
      const std::string tag = name.substr(3);
      const Eigen::Index hi = table.column("hi_" + tag);
      levels.push_back({parse_double(tag, "level tag in '" + path + "'") / 100.0,
                        {static_cast<Eigen::Index>(j), hi}});
    }
  }
  std::sort(levels.begin(), levels.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const auto G = static_cast<Eigen::Index>(table.rows.size());
  const auto L = static_cast<Eigen::Index>(levels.size());
  est.grid.resize(G);
  est.bands.median.resize(G);
  est.bands.lower.resize(L, G);
  est.bands.upper.resize(L, G);
  for (const auto& [level, cols] : levels) {
    est.bands.levels.push_back(level);
  }
  for (Eigen::Index g = 0; g < G; ++g) {
    const auto& row = table.rows[static_cast<size_t>(g)];
    const std::string where = "row " + std::to_string(g + 1) + " of '" + path + "'";
    est.grid[g] = parse_double(row[static_cast<size_t>(xcol)], where);
    est.bands.median[g] = parse_double(row[static_cast<size_t>(mcol)], where);
    for (Eigen::Index l = 0; l < L; ++l) {
      est.bands.lower(l, g) =
          parse_double(row[static_cast<size_t>(levels[static_cast<size_t>(l)].second.first)], where);
      est.bands.upper(l, g) =
          parse_double(row[static_cast<size_t>(levels[static_cast<size_t>(l)].second.second)], where);
    }
  }
  return est;
}

void write_benchmark_csv(const std::string& path, const simulation::ReplicationReport& report) {
  auto out = open_out(path);
  out << "x,truth,median";
  for (double level : report.levels) {
    out << ",lo_" << level_tag(level) << ",hi_" << level_tag(level);
  }
  for (double level : report.levels) {
    out << ",coverage_" << level_tag(level);
  }
  out << '\n';
  for (Eigen::Index g = 0; g < report.grid.size(); ++g) {
    out << format_double(report.grid[g]) << ',' << format_double(report.truth[g]) << ','
        << format_double(report.pooled_median[g]);
    for (Eigen::Index l = 0; l < static_cast<Eigen::Index>(report.levels.size()); ++l) {
      out << ',' << format_double(report.pooled_lower(l, g)) << ','
          << format_double(report.pooled_upper(l, g));
    }
    for (Eigen::Index l = 0; l < static_cast<Eigen::Index>(report.levels.size()); ++l) {
      out << ',' << format_double(report.replicate_coverage(l, g));
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("write to '" + path + "' failed");
  }
}

void write_assumption_csv(const std::string& path,
                          const std::vector<baselines::AssumptionTest>& tests) {
  auto out = open_out(path);
  out << "assumption,null,estimate,ci_lower,ci_upper,conclusion\n";
  for (const auto& t : tests) {
    out << t.assumption << ',' << t.null_hypothesis << ',' << format_double(t.estimate) << ','
        << format_double(t.ci_lower) << ',' << format_double(t.ci_upper) << ',' << t.conclusion
        << '\n';
  }
  if (!out) {
    throw IoError("write to '" + path + "' failed");
  }
}

void write_fit_metadata(const std::string& path, const baselines::FitResult& result,
                        const baselines::FitSpec& spec) {
  nlohmann::json meta;
  meta["mode"] = baselines::fit_mode_name(result.mode);
  meta["seed"] = spec.config.seed;
  meta["chains"] = spec.chains;
  meta["config"] = config_json(spec.config);
  meta["grid"] = std::vector<double>(result.cerf.grid.data(),
                                     result.cerf.grid.data() + result.cerf.grid.size());
  meta["levels"] = result.cerf.bands.levels;
  meta["draws_retained"] = result.cerf.total_draws;
  meta["identification_failures"] = result.cerf.identification_failures;
  meta["runtime_seconds"] = result.runtime_seconds;
  meta["chain_seconds"] = result.chain_seconds;
  meta["knot_segments"] = result.knot_segments;
  nlohmann::json std_echo;
  std_echo["enabled"] = result.transforms.enabled;
  auto transform_json = [](const AffineTransform& t) {
    return nlohmann::json{{"offset", t.offset}, {"scale", t.scale}};
  };
  std_echo["y"] = transform_json(result.transforms.y);
  std_echo["x"] = transform_json(result.transforms.x);
  std_echo["z"] = transform_json(result.transforms.z);
  std_echo["w"] = transform_json(result.transforms.w);
  meta["standardization"] = std_echo;
  auto out = open_out(path);
  out << meta.dump(2) << '\n';
}

void write_benchmark_summary(const std::string& path,
                             const simulation::ReplicationReport& report,
                             const simulation::ReplicationConfig& config) {
  nlohmann::json summary;
  summary["scenario"] = report.scenario;
  summary["n"] = static_cast<long long>(config.n);
  summary["replicates"] = config.replicates;
  summary["failed_replicates"] = report.failed_replicates;
  summary["config"] = config_json(config.model);
  summary["levels"] = report.levels;
  summary["pooled_coverage_central_by_level"] =
      std::vector<double>(report.pooled_coverage_by_level.data(),
                          report.pooled_coverage_by_level.data() +
                              report.pooled_coverage_by_level.size());
  summary["pooled_rmse_central"] = report.pooled_rmse_central;
  summary["mean_replicate_rmse_central"] = report.mean_replicate_rmse_central;
  summary["x_window"] = {report.x_p10, report.x_p90};
  summary["replicate_seconds"] = report.replicate_seconds;
  summary["total_seconds"] = report.total_seconds;
  // recovery gate: the pooled 95% band must cover the truth at >= 80% of the
  // central grid points
  for (size_t l = 0; l < report.levels.size(); ++l) {
    if (report.levels[l] == 0.95) {
      const double coverage =
          report.pooled_coverage_by_level[static_cast<Eigen::Index>(l)];
      summary["acceptance"] = {{"central_coverage_95", coverage},
                               {"threshold", 0.80},
                               {"pass", coverage >= 0.80}};
    }
  }
  auto out = open_out(path);
  out << summary.dump(2) << '\n';
}

void write_linear_nc_csv(const std::string& path, const baselines::LinearNcEstimate& estimate) {
  auto out = open_out(path);
  out << "estimate,ci_lower,ci_upper,ci_level,bootstrap_resamples,bootstrap_failures\n";
  out << format_double(estimate.estimate) << ',' << format_double(estimate.ci_lower) << ','
      << format_double(estimate.ci_upper) << ',' << format_double(estimate.ci_level) << ','
      << estimate.bootstrap_resamples << ',' << estimate.bootstrap_failures << '\n';
  if (!out) {
    throw IoError("write to '" + path + "' failed");
  }
}

}  // namespace serialize
}  // namespace bnpnc
